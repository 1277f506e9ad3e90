import math

import numpy as np
import pytest

from airmenu import Frame, HsvRange, box_blur, rgb_to_hsv, threshold_hsv
from airmenu.pixelops import hsv_planes
from conftest import constant_frame, random_frame
from oracles import blur_oracle


class TestBoxBlur:
    def test_constant_frame_unchanged(self):
        f = constant_frame(9, 9, (77, 77, 77))
        out = box_blur(f, 1)
        assert np.array_equal(out.pixels, f.pixels)

    def test_radius_zero_is_identity(self, rng):
        f = random_frame(rng, 8, 6)
        out = box_blur(f, 0)
        assert out is f

    def test_impulse_golden(self):
        # 255 impulse at the center of a 5x5 black frame, radius 1:
        # window sum 255 over 9 pixels -> 28.33 -> 28 half-up, for the
        # center and all eight neighbors
        px = np.zeros((5, 5, 3), dtype=np.uint8)
        px[2, 2] = 255
        out = box_blur(Frame(px), 1).pixels
        for y in (1, 2, 3):
            for x in (1, 2, 3):
                assert tuple(out[y, x]) == (28, 28, 28)
        assert out[0, 0, 0] == 0 and out[4, 4, 0] == 0

    def test_matches_window_sum_oracle(self, rng):
        for trial in range(8):
            w = int(rng.integers(3, 12))
            h = int(rng.integers(3, 12))
            radius = int(rng.integers(1, min(w, h) // 2 + 1))
            f = random_frame(rng, w, h)
            expected = blur_oracle(f.pixels, radius)
            assert np.array_equal(box_blur(f, radius).pixels, expected), (
                f"trial {trial}: {w}x{h} r={radius}"
            )

    def test_constant_idempotence_property(self, rng):
        for _ in range(25):
            rgb = tuple(int(v) for v in rng.integers(0, 256, 3))
            w, h = int(rng.integers(2, 16)), int(rng.integers(2, 16))
            radius = int(rng.integers(0, min(w, h) // 2 + 1))
            f = constant_frame(w, h, rgb)
            assert np.array_equal(box_blur(f, radius).pixels, f.pixels)

    def test_interior_mass_preserved_within_rounding(self, rng):
        radius = 2
        for _ in range(5):
            px = np.zeros((16, 16, 3), dtype=np.uint8)
            px[radius:-radius, radius:-radius] = rng.integers(
                0, 256, size=(16 - 2 * radius, 16 - 2 * radius, 3), dtype=np.uint8
            )
            out = box_blur(Frame(px), radius).pixels
            drift = abs(int(out.sum(dtype=np.int64)) - int(px.sum(dtype=np.int64)))
            assert drift <= 0.5 * px.size

    def test_radius_too_large_names_limit(self):
        f = constant_frame(5, 9, (0, 0, 0))
        with pytest.raises(ValueError, match="2.5"):
            box_blur(f, 3)

    def test_negative_radius_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            box_blur(constant_frame(4, 4, (0, 0, 0)), -1)

    def test_keeps_timestamp(self):
        f = constant_frame(4, 4, (10, 10, 10), timestamp_ms=123.5)
        assert box_blur(f, 1).timestamp_ms == 123.5


class TestRgbToHsv:
    def test_pure_red(self):
        p = rgb_to_hsv(255, 0, 0)
        assert (p.h, p.s, p.v) == (0.0, 1.0, 1.0)

    def test_gray(self):
        p = rgb_to_hsv(128, 128, 128)
        assert (p.h, p.s) == (0.0, 0.0)
        assert p.v == 128 / 255

    def test_sector_golden(self):
        # max=192 (blue), delta=128: h = 60*((64-128)/128 + 4) = 210
        p = rgb_to_hsv(64, 128, 192)
        assert math.isclose(p.h, 210.0, rel_tol=1e-9)
        assert p.s == 128 / 192
        assert p.v == 192 / 255

    def test_achromatic_all_bytes(self):
        for x in range(256):
            p = rgb_to_hsv(x, x, x)
            assert p.s == 0.0 and p.h == 0.0
            assert p.v == x / 255

    def test_invariants_and_sector_consistency(self, rng):
        triples = rng.integers(0, 256, size=(2000, 3))
        for r, g, b in triples.tolist():
            p = rgb_to_hsv(r, g, b)
            assert 0.0 <= p.h < 360.0
            assert 0.0 <= p.s <= 1.0
            assert 0.0 <= p.v <= 1.0
            mx = max(r, g, b)
            if mx > min(r, g, b):
                sectors = []
                if r == mx:
                    sectors.append(p.h >= 300.0 or p.h <= 60.0)
                if g == mx:
                    sectors.append(60.0 <= p.h <= 180.0)
                if b == mx:
                    sectors.append(180.0 <= p.h <= 300.0)
                assert any(sectors), (r, g, b, p.h)

    def test_vectorized_matches_scalar(self, rng):
        f = random_frame(rng, 13, 7)
        h, s, v = hsv_planes(f.pixels)
        for y in range(7):
            for x in range(13):
                p = rgb_to_hsv(*(int(c) for c in f.pixels[y, x]))
                assert h[y, x] == p.h and s[y, x] == p.s and v[y, x] == p.v


class TestThresholdHsv:
    def test_wrapped_range_catches_red(self):
        f = constant_frame(6, 4, (255, 0, 0))
        band = HsvRange(350.0, 10.0, 0.5, 1.0, 0.5, 1.0)
        assert threshold_hsv(f, band).bits.all()

    def test_full_band_catches_everything(self, rng):
        f = random_frame(rng, 9, 9)
        band = HsvRange(0.0, 359.999, 0.0, 1.0, 0.0, 1.0)
        assert threshold_hsv(f, band).bits.all()

    def test_hue_outside_wrapped_band(self):
        f = constant_frame(5, 5, (64, 128, 192))  # h = 210
        band = HsvRange(350.0, 10.0, 0.0, 1.0, 0.0, 1.0)
        assert not threshold_hsv(f, band).bits.any()

    def test_matches_scalar_reference(self, rng):
        def scalar_mask(frame, band):
            out = np.zeros((frame.height, frame.width), dtype=bool)
            for y in range(frame.height):
                for x in range(frame.width):
                    p = rgb_to_hsv(*(int(c) for c in frame.pixels[y, x]))
                    if band.h_lo > band.h_hi:
                        h_ok = p.h >= band.h_lo or p.h <= band.h_hi
                    else:
                        h_ok = band.h_lo <= p.h <= band.h_hi
                    out[y, x] = (
                        h_ok
                        and band.s_lo <= p.s <= band.s_hi
                        and band.v_lo <= p.v <= band.v_hi
                    )
            return out

        for _ in range(4):
            f = random_frame(rng, 10, 8)
            h_lo, h_hi = (float(v) for v in rng.uniform(0, 360, 2))
            s = sorted(float(v) for v in rng.uniform(0, 1, 2))
            v = sorted(float(v) for v in rng.uniform(0, 1, 2))
            band = HsvRange(h_lo, h_hi, s[0], s[1], v[0], v[1])
            assert np.array_equal(threshold_hsv(f, band).bits, scalar_mask(f, band))

    def test_enlarging_band_is_monotone(self, rng):
        for _ in range(10):
            f = random_frame(rng, 12, 12)
            lo, hi = sorted(float(v) for v in rng.uniform(0, 359, 2))
            s = sorted(float(v) for v in rng.uniform(0, 1, 2))
            v = sorted(float(v) for v in rng.uniform(0, 1, 2))
            band = HsvRange(lo, hi, s[0], s[1], v[0], v[1])
            wider = HsvRange(
                max(lo - 20.0, 0.0), min(hi + 20.0, 359.99),
                max(s[0] - 0.2, 0.0), min(s[1] + 0.2, 1.0),
                max(v[0] - 0.2, 0.0), min(v[1] + 0.2, 1.0),
            )
            narrow = threshold_hsv(f, band).bits
            wide = threshold_hsv(f, wider).bits
            assert not (narrow & ~wide).any()

    def test_wrapped_equals_or_of_split(self, rng):
        high_end = math.nextafter(360.0, 0.0)
        for _ in range(10):
            f = random_frame(rng, 12, 12)
            b = float(rng.uniform(0, 170))
            a = float(rng.uniform(190, 359))
            s = sorted(float(x) for x in rng.uniform(0, 1, 2))
            v = sorted(float(x) for x in rng.uniform(0, 1, 2))
            wrapped = threshold_hsv(f, HsvRange(a, b, s[0], s[1], v[0], v[1])).bits
            upper = threshold_hsv(f, HsvRange(a, high_end, s[0], s[1], v[0], v[1])).bits
            lower = threshold_hsv(f, HsvRange(0.0, b, s[0], s[1], v[0], v[1])).bits
            assert np.array_equal(wrapped, upper | lower)


class TestHsvRange:
    def test_rejects_bad_bounds(self):
        with pytest.raises(ValueError):
            HsvRange(360.0, 10.0, 0.0, 1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            HsvRange(0.0, 10.0, 0.8, 0.2, 0.0, 1.0)
        with pytest.raises(ValueError):
            HsvRange(0.0, 10.0, 0.0, 1.0, 0.0, 1.5)

    def test_wrap_flag(self):
        assert HsvRange(350.0, 10.0, 0.0, 1.0, 0.0, 1.0).wraps
        assert not HsvRange(10.0, 350.0, 0.0, 1.0, 0.0, 1.0).wraps
