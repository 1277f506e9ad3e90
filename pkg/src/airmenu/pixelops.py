"""Pixel-level kernels: box blur, RGB to HSV, and HSV-band thresholding.

All three are pure functions over immutable values. The blur is a uniform
(2r+1)^2 box with edge replication and half-up rounding, so outputs are
bit-exact and testable against golden values. Hue is in degrees [0, 360),
saturation and value are fractions; the hue of achromatic pixels is pinned
to 0 so results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frame import BinaryMask, Frame


@dataclass(frozen=True)
class HsvPixel:
    """Hue in degrees [0, 360), saturation and value as fractions [0, 1]."""

    h: float
    s: float
    v: float


@dataclass(frozen=True)
class HsvRange:
    """Inclusive HSV band. h_lo > h_hi is legal and wraps around 0 degrees."""

    h_lo: float
    h_hi: float
    s_lo: float
    s_hi: float
    v_lo: float
    v_hi: float

    def __post_init__(self):
        for name in ("h_lo", "h_hi"):
            h = getattr(self, name)
            if not 0.0 <= h < 360.0:
                raise ValueError(f"{name} must be in [0, 360), got {h}")
        for lo_name, hi_name in (("s_lo", "s_hi"), ("v_lo", "v_hi")):
            lo, hi = getattr(self, lo_name), getattr(self, hi_name)
            if not 0.0 <= lo <= 1.0 or not 0.0 <= hi <= 1.0:
                raise ValueError(f"{lo_name}/{hi_name} must be in [0, 1]")
            if lo > hi:
                raise ValueError(f"{lo_name} must not exceed {hi_name}")

    @property
    def wraps(self) -> bool:
        return self.h_lo > self.h_hi


def box_blur(frame: Frame, radius: int) -> Frame:
    """Mean filter over a (2*radius+1)^2 window, borders edge-replicated.

    Each output channel is the window mean rounded half-up to a byte.
    Radius 0 returns the input frame unchanged.
    """
    if radius < 0:
        raise ValueError(f"blur radius must be non-negative, got {radius}")
    limit = min(frame.width, frame.height) / 2
    if radius > limit:
        raise ValueError(
            f"blur radius {radius} exceeds limit {limit:g} for a "
            f"{frame.width}x{frame.height} frame"
        )
    if radius == 0:
        return frame
    k = 2 * radius + 1
    count = k * k
    w, h = frame.width, frame.height
    padded = np.pad(frame.pixels, ((radius, radius), (radius, radius), (0, 0)), mode="edge")
    if k <= 11:
        # separable sliding sums fit uint16 (2*255*k^2 + k^2 < 2^16 for k <= 11)
        hsum = padded[:, 0:w].astype(np.uint16)
        for j in range(1, k):
            hsum += padded[:, j : j + w]
        sums = hsum[0:h].copy()
        for i in range(1, k):
            sums += hsum[i : i + h]
    else:
        acc = np.cumsum(padded, axis=0, dtype=np.int64)
        acc = np.vstack([np.zeros((1,) + acc.shape[1:], np.int64), acc])
        vert = acc[k:] - acc[:-k]
        acc = np.cumsum(vert, axis=1)
        acc = np.hstack([np.zeros((acc.shape[0], 1, 3), np.int64), acc])
        sums = acc[:, k:] - acc[:, :-k]
    out = ((2 * sums + count) // (2 * count)).astype(np.uint8)  # round half-up
    return Frame(out, frame.timestamp_ms)


def rgb_to_hsv(r: int, g: int, b: int) -> HsvPixel:
    """Hexcone conversion of one RGB byte triple.

    v = max/255, s = (max-min)/max (0 when max is 0), h from the max-channel
    sector formula normalized into [0, 360). Ties pick the first max channel
    in r, g, b order; achromatic pixels get h = 0.
    """
    mx = max(r, g, b)
    mn = min(r, g, b)
    delta = mx - mn
    v = mx / 255.0
    s = 0.0 if mx == 0 else delta / mx
    if delta == 0:
        h = 0.0
    elif mx == r:
        h = 60.0 * (((g - b) / delta) % 6.0)
    elif mx == g:
        h = 60.0 * ((b - r) / delta + 2.0)
    else:
        h = 60.0 * ((r - g) / delta + 4.0)
    return HsvPixel(h, s, v)


def hsv_planes(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized rgb_to_hsv over a (h, w, 3) uint8 raster.

    Mirrors the scalar formula operation for operation (same float64
    arithmetic), so the two paths agree bit for bit.
    """
    c = pixels.astype(np.int32)
    r, g, b = c[..., 0], c[..., 1], c[..., 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = mx - mn
    v = mx / 255.0
    s = np.where(mx == 0, 0.0, delta / np.where(mx == 0, 1, mx))
    dsafe = np.where(delta == 0, 1, delta)
    h_r = 60.0 * (((g - b) / dsafe) % 6.0)
    h_g = 60.0 * ((b - r) / dsafe + 2.0)
    h_b = 60.0 * ((r - g) / dsafe + 4.0)
    h = np.select([delta == 0, mx == r, mx == g], [0.0, h_r, h_g], default=h_b)
    return h, s, v


def threshold_hsv(frame: Frame, band: HsvRange) -> BinaryMask:
    """Mark each pixel true iff its HSV value lies inside the band (inclusive).

    A wrapped band (h_lo > h_hi) tests h >= h_lo OR h <= h_hi.
    """
    h, s, v = hsv_planes(frame.pixels)
    if band.wraps:
        h_ok = (h >= band.h_lo) | (h <= band.h_hi)
    else:
        h_ok = (h >= band.h_lo) & (h <= band.h_hi)
    bits = h_ok & (s >= band.s_lo) & (s <= band.s_hi) & (v >= band.v_lo) & (v <= band.v_hi)
    return BinaryMask(bits)
