import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from orgamask import (
    BinaryMask,
    OverlapMode,
    area,
    centroid,
    connected_components,
    iou,
    largest_component,
    overlap_fraction,
    union,
)

from maskgen import random_mask
from oracles import components_bfs, iou_pixel_counting


def grids(max_side: int = 16):
    return hnp.arrays(
        dtype=bool,
        shape=st.tuples(
            st.integers(1, max_side), st.integers(1, max_side)
        ),
    )


def mask_pairs(max_side: int = 16):
    return st.tuples(
        st.integers(1, max_side), st.integers(1, max_side)
    ).flatmap(
        lambda dims: st.tuples(
            hnp.arrays(dtype=bool, shape=dims), hnp.arrays(dtype=bool, shape=dims)
        )
    )


class TestBinaryMask:
    def test_wraps_and_freezes_data(self):
        src = np.array([[True, False]])
        mask = BinaryMask(src)
        src[0, 0] = False
        assert mask.data[0, 0]  # constructor copies
        with pytest.raises(ValueError):
            mask.data[0, 0] = False  # and the copy is read-only

    def test_dims_are_width_height(self):
        mask = BinaryMask.empty(3, 2)
        assert mask.width == 3
        assert mask.height == 2
        assert mask.dims == (3, 2)
        assert mask.data.shape == (2, 3)

    def test_rejects_non_2d(self):
        with pytest.raises(ValueError):
            BinaryMask(np.zeros(4, dtype=bool))

    def test_rejects_zero_dims(self):
        with pytest.raises(ValueError):
            BinaryMask.empty(0, 3)

    def test_rejects_oversize_grid(self):
        with pytest.raises(ValueError, match="grid size"):
            BinaryMask.empty(2**18, 1)

    def test_from_pixels_and_contains(self):
        mask = BinaryMask.from_pixels(4, 3, [(0, 0), (2, 3)])
        assert (0, 0) in mask
        assert (1, 1) not in mask
        assert mask.pixels() == [(0, 0), (2, 3)]

    def test_from_pixels_out_of_range(self):
        with pytest.raises(ValueError):
            BinaryMask.from_pixels(2, 2, [(0, 5)])

    def test_equality(self):
        a = BinaryMask.from_pixels(2, 2, [(0, 0)])
        b = BinaryMask.from_pixels(2, 2, [(0, 0)])
        c = BinaryMask.from_pixels(2, 2, [(1, 1)])
        assert a == b
        assert a != c
        assert a != BinaryMask.empty(2, 3)

    def test_empty_full(self):
        assert BinaryMask.empty(3, 3).is_empty
        assert area(BinaryMask.full(3, 3)) == 9


class TestIou:
    def test_known_value(self):
        a = BinaryMask.from_pixels(4, 1, [(0, 0), (0, 1)])
        b = BinaryMask.from_pixels(4, 1, [(0, 1), (0, 2)])
        assert iou(a, b) == 1 / 3

    def test_identical_masks(self):
        a = BinaryMask.from_pixels(3, 3, [(1, 1), (2, 2)])
        assert iou(a, a) == 1.0

    def test_disjoint_masks(self):
        a = BinaryMask.from_pixels(3, 1, [(0, 0)])
        b = BinaryMask.from_pixels(3, 1, [(0, 2)])
        assert iou(a, b) == 0.0

    def test_both_empty_is_zero(self):
        e = BinaryMask.empty(3, 3)
        assert iou(e, e) == 0.0

    def test_dim_mismatch(self):
        with pytest.raises(ValueError, match="3x3"):
            iou(BinaryMask.empty(3, 3), BinaryMask.empty(3, 4))

    @settings(max_examples=60, deadline=None)
    @given(mask_pairs())
    def test_matches_counting_oracle(self, pair):
        a, b = BinaryMask(pair[0]), BinaryMask(pair[1])
        assert iou(a, b) == iou_pixel_counting(a, b)

    @settings(max_examples=60, deadline=None)
    @given(mask_pairs())
    def test_symmetry_and_bounds(self, pair):
        a, b = BinaryMask(pair[0]), BinaryMask(pair[1])
        value = iou(a, b)
        assert value == iou(b, a)
        assert 0.0 <= value <= 1.0


class TestOverlapFraction:
    def test_candidate_fraction(self):
        candidate = BinaryMask.from_pixels(4, 4, [(0, 0), (0, 1)])
        prototype = BinaryMask.from_pixels(4, 4, [(0, 1), (0, 2), (0, 3)])
        assert (
            overlap_fraction(candidate, prototype, OverlapMode.CANDIDATE_FRACTION)
            == 0.5
        )
        assert overlap_fraction(candidate, prototype, OverlapMode.IOU) == 1 / 4

    def test_empty_candidate(self):
        empty = BinaryMask.empty(2, 2)
        full = BinaryMask.full(2, 2)
        assert (
            overlap_fraction(empty, full, OverlapMode.CANDIDATE_FRACTION) == 0.0
        )

    def test_contained_candidate_scores_one(self):
        candidate = BinaryMask.from_pixels(4, 4, [(1, 1)])
        prototype = BinaryMask.full(4, 4)
        assert (
            overlap_fraction(candidate, prototype, OverlapMode.CANDIDATE_FRACTION)
            == 1.0
        )


class TestUnion:
    def test_empty_list_needs_dims(self):
        assert union([], dims=(3, 2)) == BinaryMask.empty(3, 2)
        with pytest.raises(ValueError):
            union([])

    def test_union_of_parts(self):
        a = BinaryMask.from_pixels(3, 1, [(0, 0)])
        b = BinaryMask.from_pixels(3, 1, [(0, 2)])
        assert union([a, b]).pixels() == [(0, 0), (0, 2)]

    @settings(max_examples=40, deadline=None)
    @given(mask_pairs())
    def test_commutative_idempotent(self, pair):
        a, b = BinaryMask(pair[0]), BinaryMask(pair[1])
        assert union([a, b]) == union([b, a])
        assert union([a, a]) == a
        assert union([a, b, a]) == union([a, b])


class TestConnectedComponents:
    def test_diagonal_is_connected(self):
        mask = BinaryMask.from_pixels(2, 2, [(0, 0), (1, 1)])
        assert connected_components(mask).num_components == 1

    def test_separated_regions(self):
        mask = BinaryMask.from_pixels(5, 1, [(0, 0), (0, 2), (0, 4)])
        labeled = connected_components(mask)
        assert labeled.num_components == 3
        assert labeled.component_mask(2).pixels() == [(0, 2)]

    def test_raster_discovery_order(self):
        # the component containing the first raster-order pixel gets label 1
        mask = BinaryMask.from_pixels(4, 4, [(0, 3), (3, 0)])
        labeled = connected_components(mask)
        assert labeled.labels[0, 3] == 1
        assert labeled.labels[3, 0] == 2

    def test_empty_mask(self):
        labeled = connected_components(BinaryMask.empty(3, 3))
        assert labeled.num_components == 0

    def test_component_mask_label_range(self):
        labeled = connected_components(BinaryMask.full(2, 2))
        with pytest.raises(ValueError):
            labeled.component_mask(2)

    @settings(max_examples=50, deadline=None)
    @given(grids())
    def test_matches_bfs_oracle(self, grid):
        mask = BinaryMask(grid)
        labeled = connected_components(mask)
        expected = components_bfs(mask)
        assert np.array_equal(labeled.labels, expected)

    @settings(max_examples=40, deadline=None)
    @given(grids())
    def test_components_partition_mask(self, grid):
        mask = BinaryMask(grid)
        labeled = connected_components(mask)
        parts = [
            labeled.component_mask(label)
            for label in range(1, labeled.num_components + 1)
        ]
        assert union(parts, dims=mask.dims) == mask
        total = sum(area(p) for p in parts)
        assert total == area(mask)


class TestLargestComponent:
    def test_picks_biggest(self):
        mask = BinaryMask.from_pixels(6, 1, [(0, 0), (0, 2), (0, 3)])
        assert largest_component(mask).pixels() == [(0, 2), (0, 3)]

    def test_tie_keeps_earliest_label(self):
        mask = BinaryMask.from_pixels(5, 1, [(0, 0), (0, 2)])
        assert largest_component(mask).pixels() == [(0, 0)]

    def test_empty_maps_to_empty(self):
        assert largest_component(BinaryMask.empty(2, 2)) == BinaryMask.empty(2, 2)


class TestCentroid:
    def test_single_pixel(self):
        assert centroid(BinaryMask.from_pixels(3, 3, [(1, 2)])) == (1.0, 2.0)

    def test_l_shape(self):
        mask = BinaryMask.from_pixels(2, 2, [(0, 0), (1, 0), (0, 1)])
        assert centroid(mask) == (1 / 3, 1 / 3)

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            centroid(BinaryMask.empty(2, 2))

    def test_matches_mean_of_pixels(self, rng):
        for _ in range(20):
            mask = random_mask(rng, 9, 7)
            if mask.is_empty:
                continue
            rows, cols = np.nonzero(mask.data)
            assert centroid(mask) == (
                pytest.approx(rows.mean()),
                pytest.approx(cols.mean()),
            )
