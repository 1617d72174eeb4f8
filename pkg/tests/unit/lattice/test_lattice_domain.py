"""Tests for lattice boxes, exhaustions and tail regions."""

import numpy as np
import pytest

from src.error import DomainError, NonIncreasingRadii, NonPositiveMeasure, UnknownRadius
from src.lattice import NodeSet, build_exhaustion, tail_region


class TestNodeSet:
    """Box node sets and the node <-> row map."""

    def test_path3_box(self):
        nodes = NodeSet.box(1, 1)
        assert nodes.n == 3
        assert nodes.nodes() == [(-1,), (0,), (1,)]
        assert nodes.row((0,)) == 1

    def test_lexicographic_order_in_2d(self):
        nodes = NodeSet.box(2, 1)
        assert nodes.n == 9
        assert nodes.nodes()[:3] == [(-1, -1), (-1, 0), (-1, 1)]
        assert (0, 0) in nodes
        assert (2, 0) not in nodes

    def test_unknown_node_raises_key_error(self):
        with pytest.raises(KeyError):
            NodeSet.box(1, 1).row((5,))


class TestBuildExhaustion:
    """Exhaustion validation and derived quantities."""

    def test_path3_exhaustion(self, path3_exhaustion):
        assert path3_exhaustion.radii == (1,)
        assert path3_exhaustion.node_count(1) == 3
        assert path3_exhaustion.anchor == (0,)
        assert path3_exhaustion.probe == (1,)
        np.testing.assert_array_equal(path3_exhaustion.measure_on(1), np.ones(3))

    def test_nested_box_rows_are_sorted_subsets(self):
        ex = build_exhaustion(dimension=2, radii=[1, 2], ambient_radius=3)
        small, large = ex.box_rows(1), ex.box_rows(2)
        assert len(small) == 9 and len(large) == 25
        assert np.all(np.diff(small) > 0)
        assert set(small) <= set(large)
        assert ex.box(1).nodes() == NodeSet.box(2, 1).nodes()

    def test_checkerboard_measure(self):
        ex = build_exhaustion(dimension=1, radii=[1], ambient_radius=2, measure_spec="checkerboard:1,2")
        np.testing.assert_array_equal(ex.measure, [1.0, 2.0, 1.0, 2.0, 1.0])

    def test_non_increasing_radii(self):
        with pytest.raises(NonIncreasingRadii):
            build_exhaustion(dimension=1, radii=[4, 4], ambient_radius=8)

    def test_ambient_smaller_than_largest_box(self):
        with pytest.raises(DomainError) as exc_info:
            build_exhaustion(dimension=1, radii=[2, 4], ambient_radius=3)
        assert exc_info.value.error_code == "AMBIENT_TOO_SMALL"

    def test_unsupported_dimension(self):
        with pytest.raises(DomainError):
            build_exhaustion(dimension=4, radii=[1], ambient_radius=1)

    def test_non_positive_measure(self):
        with pytest.raises(NonPositiveMeasure):
            build_exhaustion(dimension=1, radii=[1], ambient_radius=2, measure_spec=0.0)

    def test_anchor_outside_smallest_box(self):
        with pytest.raises(DomainError) as exc_info:
            build_exhaustion(dimension=1, radii=[1, 2], ambient_radius=2, anchor=[2])
        assert exc_info.value.error_code == "ANCHOR_OUTSIDE"

    def test_check_radius(self):
        ex = build_exhaustion(dimension=1, radii=[2, 4], ambient_radius=6)
        assert ex.check_radius(4) == 4
        assert ex.check_radius(5, allow_any_box=True) == 5
        with pytest.raises(UnknownRadius):
            ex.check_radius(5)
        with pytest.raises(UnknownRadius):
            ex.check_radius(7, allow_any_box=True)


class TestTailRegion:
    """Tail regions beyond an exhaustion radius."""

    def test_tail_in_1d(self):
        ex = build_exhaustion(dimension=1, radii=[1, 2], ambient_radius=3)
        tail = tail_region(ex, 1)
        assert tail.nodes() == [(-3,), (-2,), (2,), (3,)]

    def test_unknown_tail_mode(self):
        ex = build_exhaustion(dimension=1, radii=[1], ambient_radius=2)
        with pytest.raises(DomainError):
            tail_region(ex, 1, mode="closed")
