import numpy as np
import pytest

from airmenu import BinaryMask, Blob, filter_blobs, label_components, largest_blob
from oracles import flood_fill_blobs


def mask_from_rows(rows):
    return BinaryMask(np.array(rows, dtype=bool))


def assert_matches_oracle(mask: BinaryMask, connectivity: int):
    got = label_components(mask, connectivity)
    expected, _ = flood_fill_blobs(mask.bits, connectivity)
    assert len(got) == len(expected)
    for b, e in zip(got, expected):
        assert b.label == e["label"]
        assert b.area == e["area"]
        assert b.centroid == e["centroid"]
        assert b.bbox == e["bbox"]


class TestLabelComponents:
    def test_empty_mask(self):
        assert label_components(BinaryMask(np.zeros((8, 8), bool)), 8) == []

    def test_full_mask(self):
        blobs = label_components(BinaryMask(np.ones((4, 4), bool)), 8)
        assert len(blobs) == 1
        b = blobs[0]
        assert b.label == 1
        assert b.area == 16
        assert b.centroid == (1.5, 1.5)
        assert b.bbox == (0, 0, 3, 3)

    def test_isolated_corners_raster_order(self):
        bits = np.zeros((5, 5), bool)
        bits[0, 0] = True
        bits[4, 4] = True
        blobs = label_components(BinaryMask(bits), 8)
        assert [(b.label, b.area) for b in blobs] == [(1, 1), (2, 1)]
        assert blobs[0].bbox == (0, 0, 0, 0)
        assert blobs[1].bbox == (4, 4, 4, 4)

    def test_diagonal_connectivity_difference(self):
        bits = np.array([[1, 0], [0, 1]], dtype=bool)
        assert len(label_components(BinaryMask(bits), 4)) == 2
        assert len(label_components(BinaryMask(bits), 8)) == 1

    def test_known_shapes_against_oracle(self):
        shapes = [
            [[1, 1, 0, 1], [0, 1, 0, 1], [1, 0, 0, 1], [1, 1, 1, 1]],
            [[0, 1, 0], [1, 0, 1], [0, 1, 0]],
            [[1]],
            [[1, 0, 1, 0, 1]],
        ]
        for rows in shapes:
            for conn in (4, 8):
                assert_matches_oracle(mask_from_rows(rows), conn)

    def test_random_masks_against_oracle(self, rng):
        for density in (0.2, 0.5, 0.8):
            for _ in range(20):
                bits = rng.random((32, 32)) < density
                for conn in (4, 8):
                    assert_matches_oracle(BinaryMask(bits), conn)

    def test_partition_property(self, rng):
        for _ in range(20):
            bits = rng.random((40, 40)) < 0.5
            blobs = label_components(BinaryMask(bits), 8)
            assert sum(b.area for b in blobs) == int(bits.sum())
            assert [b.label for b in blobs] == list(range(1, len(blobs) + 1))

    def test_connectivity_nesting(self, rng):
        for _ in range(10):
            bits = rng.random((24, 24)) < 0.4
            _, img4 = flood_fill_blobs(bits, 4)
            _, img8 = flood_fill_blobs(bits, 8)
            blobs4 = label_components(BinaryMask(bits), 4)
            blobs8 = label_components(BinaryMask(bits), 8)
            assert len(blobs8) <= len(blobs4)
            # every 4-component sits inside exactly one 8-component
            for label4 in range(1, len(blobs4) + 1):
                owners = set(img8[img4 == label4].tolist())
                assert len(owners) == 1

    def test_deterministic(self, rng):
        bits = rng.random((30, 30)) < 0.5
        first = label_components(BinaryMask(bits), 8)
        second = label_components(BinaryMask(bits.copy()), 8)
        assert first == second

    def test_bad_connectivity(self):
        with pytest.raises(ValueError, match="connectivity"):
            label_components(BinaryMask(np.zeros((2, 2), bool)), 6)

    def test_centroid_inside_bbox(self, rng):
        for _ in range(5):
            bits = rng.random((20, 20)) < 0.3
            for b in label_components(BinaryMask(bits), 8):
                x0, y0, x1, y1 = b.bbox
                assert x0 <= b.centroid[0] <= x1
                assert y0 <= b.centroid[1] <= y1


def make_blob(label, area):
    return Blob(label=label, area=area, centroid=(0.0, 0.0), bbox=(0, 0, 0, 0))


class TestFilterAndLargest:
    def test_filter_empty(self):
        assert filter_blobs([], 10) == []

    def test_filter_keeps_big(self):
        blobs = [make_blob(1, 3), make_blob(2, 50), make_blob(3, 7)]
        assert [b.label for b in filter_blobs(blobs, 10)] == [2]

    def test_filter_min_area_one_is_identity(self):
        blobs = [make_blob(1, 3), make_blob(2, 50)]
        assert filter_blobs(blobs, 1) == blobs

    def test_largest_of_empty_is_none(self):
        assert largest_blob([]) is None

    def test_largest_tie_breaks_by_label(self):
        blobs = [make_blob(1, 10), make_blob(2, 40), make_blob(3, 40)]
        assert largest_blob(blobs).label == 2

    def test_largest_picks_max(self):
        blobs = [make_blob(1, 5), make_blob(2, 9)]
        assert largest_blob(blobs).label == 2
