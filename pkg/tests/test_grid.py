"""Tests for discretized fuzzy sets."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gifzs.errors import EmptySetError, GridMismatchError, NonNestedCutsError, NotNormalError, OffLatticeError
from gifzs.grid import (
    CrispCellSet,
    DomainBox,
    FuzzyGrid,
    alpha_cut,
    cartesian_product,
    cut_at_level,
    cut_stack,
    indicator,
    join,
    level_of,
    product_cut_tuples,
    random_normal,
    reconstruct_from_cuts,
)


class TestDomainBox:
    """Tests for DomainBox geometry."""

    def test_unit_box(self):
        """Unit box has unit bounds and C-order size."""
        box = DomainBox.unit(4, 3)
        assert box.lo == (0.0, 0.0)
        assert box.hi == (1.0, 1.0)
        assert box.size == 12
        assert box.dim == 2

    def test_invalid_bounds_raise(self):
        """lo must lie below hi on every axis."""
        with pytest.raises(ValueError, match="must be below"):
            DomainBox((1.0,), (0.0,), (4,))

    def test_nonpositive_cells_raise(self):
        """Cell counts must be positive."""
        with pytest.raises(ValueError, match="cell count"):
            DomainBox((0.0,), (1.0,), (0,))

    def test_mismatched_lengths_raise(self):
        """lo, hi and cells need the same length."""
        with pytest.raises(ValueError):
            DomainBox((0.0, 0.0), (1.0,), (4,))

    def test_centers(self):
        """Cell centers sit in the middle of each cell."""
        box = DomainBox.unit(4)
        assert box.centers[:, 0].tolist() == [0.125, 0.375, 0.625, 0.875]

    def test_diagonal(self):
        """Diagonal of one square cell."""
        box = DomainBox.unit(4, 4)
        assert box.diagonal == pytest.approx(np.sqrt(2) / 4)

    def test_center_cell(self):
        """Middle cell of an even line is the upper of the two middle cells."""
        assert DomainBox.unit(16).center_cell() == 8
        assert DomainBox.unit(3, 3).center_cell() == 4

    def test_nearest_cells_ties_go_down(self):
        """A point on a cell boundary snaps to the lower cell."""
        box = DomainBox.unit(4)
        cells, outside = box.nearest_cells(np.array([[0.25], [0.26], [0.0]]))
        assert cells.tolist() == [0, 1, 0]
        assert outside == 0

    def test_nearest_cells_clamps_outside(self):
        """Points outside the box are clamped and counted."""
        box = DomainBox.unit(4)
        cells, outside = box.nearest_cells(np.array([[1.5], [-0.5], [0.5]]))
        assert cells.tolist() == [3, 0, 1]
        assert outside == 2

    def test_nearest_cells_wraps(self):
        """On a wrapped box points are taken modulo the extent."""
        box = DomainBox.unit(4, wrap=True)
        cells, outside = box.nearest_cells(np.array([[1.1], [-0.1]]))
        assert cells.tolist() == [0, 3]
        assert outside == 0

    def test_cell_distances(self):
        """Distances between centers, shortest way around on a wrapped box."""
        flat = DomainBox.unit(4)
        ring = DomainBox.unit(4, wrap=True)
        assert flat.cell_distances(np.array([0]), np.array([3]))[0, 0] == pytest.approx(0.75)
        assert ring.cell_distances(np.array([0]), np.array([3]))[0, 0] == pytest.approx(0.25)

    def test_rectangular_cell_distances(self):
        """Non-square cells weight each axis by its own width."""
        box = DomainBox((0.0, 0.0), (2.0, 1.0), (4, 4))
        a = np.array([0])
        b = np.array([np.ravel_multi_index((1, 1), (4, 4))])
        assert box.cell_distances(a, b)[0, 0] == pytest.approx(np.hypot(0.5, 0.25))

    def test_paired_distances_match_matrix(self):
        """paired_distances is the diagonal of cell_distances."""
        box = DomainBox.unit(5, 3)
        a = np.array([0, 4, 7, 14])
        b = np.array([14, 2, 7, 0])
        assert np.allclose(box.paired_distances(a, b), np.diag(box.cell_distances(a, b)))


class TestCrispCellSet:
    """Tests for CrispCellSet."""

    def test_from_cells(self, line16):
        """Cells given by index."""
        s = CrispCellSet.from_cells(line16, [1, 5, 5])
        assert s.cells == frozenset({1, 5})
        assert len(s) == 2
        assert 5 in s
        assert 2 not in s

    def test_out_of_range_raises(self, line16):
        """Indices beyond the box raise."""
        with pytest.raises(ValueError, match="outside"):
            CrispCellSet.from_cells(line16, [16])

    def test_set_operations(self, line16):
        """Union, intersection and inclusion."""
        a = CrispCellSet.from_cells(line16, [1, 2])
        b = CrispCellSet.from_cells(line16, [2, 3])
        assert (a | b).cells == {1, 2, 3}
        assert (a & b).cells == {2}
        assert (a & b) <= a
        assert not a <= b

    def test_mask_size_mismatch_raises(self, line16):
        """A mask must cover the box exactly."""
        with pytest.raises(GridMismatchError):
            CrispCellSet(line16, np.zeros(15, dtype=bool))

    def test_different_boxes_raise(self, line16):
        """Operations across boxes are rejected."""
        other = CrispCellSet.full(DomainBox.unit(8))
        with pytest.raises(GridMismatchError):
            CrispCellSet.full(line16) | other

    def test_require_nonempty(self, line16):
        """Empty sets are rejected where a compact set is required."""
        with pytest.raises(EmptySetError):
            CrispCellSet.from_cells(line16, []).require_nonempty()

    def test_equality_and_hash(self, line16):
        """Equal masks compare and hash equal."""
        a = CrispCellSet.from_cells(line16, [3, 4])
        b = CrispCellSet.from_cells(line16, [4, 3])
        assert a == b
        assert hash(a) == hash(b)


class TestFuzzyGrid:
    """Tests for FuzzyGrid."""

    def test_from_memberships_rounds_to_nearest(self):
        """Memberships are quantized to the nearest level."""
        box = DomainBox.unit(3)
        u = FuzzyGrid.from_memberships(box, [0.0, 0.5, 1.0], levels=4)
        assert u.values.tolist() == [0, 2, 4]

    def test_out_of_range_values_raise(self, line16):
        """Levels above L are rejected."""
        with pytest.raises(ValueError, match="levels must lie"):
            FuzzyGrid(line16, np.full(16, 5), levels=4)

    def test_values_are_immutable(self, line16):
        """Grids are frozen after construction."""
        u = FuzzyGrid.full(line16, 4)
        with pytest.raises(ValueError):
            u.values[0] = 0

    def test_normality(self, line16):
        """Normal iff some cell reaches L."""
        u = FuzzyGrid(line16, np.arange(16) % 5, levels=4)
        assert u.is_normal()
        v = FuzzyGrid(line16, np.arange(16) % 4, levels=4)
        assert not v.is_normal()
        with pytest.raises(NotNormalError):
            v.require_normal()

    def test_support(self, line16):
        """Support is the set of nonzero cells."""
        values = np.zeros(16, dtype=int)
        values[[2, 7]] = [1, 4]
        assert FuzzyGrid(line16, values, 4).support().cells == {2, 7}

    def test_inclusion(self, line16):
        """Fuzzy inclusion is cellwise comparison."""
        small = FuzzyGrid(line16, np.full(16, 2), 4)
        big = FuzzyGrid.full(line16, 4)
        assert small <= big
        assert big >= small
        assert not big <= small

    def test_incompatible_levels_raise(self, line16):
        """Comparisons need equal level counts."""
        with pytest.raises(GridMismatchError):
            FuzzyGrid.full(line16, 4) <= FuzzyGrid.full(line16, 8)

    def test_as_array_uses_box_layout(self):
        """as_array reshapes to the cell layout."""
        box = DomainBox.unit(3, 2)
        u = FuzzyGrid(box, np.arange(6), levels=8)
        assert u.as_array().shape == (3, 2)
        assert u.as_array()[1, 0] == 2


class TestCuts:
    """Tests for α-cuts and reconstruction."""

    def test_level_of(self):
        """Thresholds map to lattice levels."""
        assert level_of(0.5, 4) == 2
        assert level_of(Fraction(1, 3), 6) == 2
        assert level_of(1, 255) == 255

    def test_level_of_off_lattice_raises(self):
        """Thresholds between lattice points are rejected."""
        with pytest.raises(OffLatticeError):
            level_of(0.3, 4)
        with pytest.raises(OffLatticeError):
            level_of(Fraction(1, 3), 4)
        with pytest.raises(OffLatticeError):
            level_of(1.5, 4)

    def test_alpha_cut(self, line16):
        """The α-cut holds the cells at or above α."""
        values = np.zeros(16, dtype=int)
        values[[1, 2, 3]] = [1, 2, 4]
        u = FuzzyGrid(line16, values, 4)
        assert alpha_cut(u, 0.5).cells == {2, 3}
        assert alpha_cut(u, 1).cells == {3}

    def test_zero_cut_is_support(self, line16):
        """Level 0 gives the support, not the whole box."""
        values = np.zeros(16, dtype=int)
        values[[4, 9]] = [1, 4]
        u = FuzzyGrid(line16, values, 4)
        assert alpha_cut(u, 0).cells == {4, 9}
        assert cut_at_level(u, 0) == u.support()

    def test_cut_stack_is_nested(self, rng, line16):
        """Cuts shrink as the level grows."""
        u = random_normal(line16, 6, rng)
        stack = cut_stack(u)
        assert len(stack) == 6
        for lower, upper in zip(stack, stack[1:]):
            assert upper <= lower

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=7), min_size=10, max_size=10))
    def test_reconstruct_inverts_cut_stack(self, values):
        """Rebuilding from the cuts returns the original grid."""
        values[0] = 7
        box = DomainBox.unit(10)
        u = FuzzyGrid(box, values, 7)
        assert reconstruct_from_cuts(cut_stack(u)) == u

    def test_reconstruct_rejects_non_nested(self, line16):
        """A cut that grows with the level is reported with its level."""
        cuts = [
            CrispCellSet.from_cells(line16, [1]),
            CrispCellSet.from_cells(line16, [1, 2]),
        ]
        with pytest.raises(NonNestedCutsError) as exc:
            reconstruct_from_cuts(cuts)
        assert exc.value.level == 2

    def test_reconstruct_requires_top_cut(self, line16):
        """An empty top cut would give a non-normal set."""
        cuts = [CrispCellSet.from_cells(line16, [1]), CrispCellSet.from_cells(line16, [])]
        with pytest.raises(NotNormalError):
            reconstruct_from_cuts(cuts)


class TestIndicatorAndJoin:
    """Tests for indicators and fuzzy union."""

    def test_indicator(self, line16):
        """χ_K is L on K and 0 elsewhere."""
        u = indicator(CrispCellSet.from_cells(line16, [2, 3]), 4)
        assert u.values[2] == 4
        assert u.support().cells == {2, 3}
        assert u.is_normal()

    def test_indicator_of_empty_set_raises(self, line16):
        """χ_∅ is not a member of the fuzzy space."""
        with pytest.raises(EmptySetError):
            indicator(CrispCellSet.from_cells(line16, []))

    def test_join_is_cellwise_max(self, rng, line16):
        """Union of fuzzy sets."""
        u = random_normal(line16, 6, rng)
        v = random_normal(line16, 6, rng)
        assert np.array_equal(join(u, v).values, np.maximum(u.values, v.values))


class TestCartesianProduct:
    """Tests for products of fuzzy sets."""

    def test_membership_is_minimum(self, line16):
        """Product membership is the smallest factor membership."""
        u = FuzzyGrid(line16, np.arange(16) % 5, 4)
        v = FuzzyGrid.full(line16, 4)
        p = cartesian_product(u, v)
        assert p.level_at((3, 7)) == 3
        assert p.membership((4, 0)) == 1.0
        assert p.is_normal()

    def test_cut_of_product_is_product_of_cuts(self, rng):
        """[u × v]^α = [u]^α × [v]^α."""
        box = DomainBox.unit(6)
        u = random_normal(box, 4, rng)
        v = random_normal(box, 4, rng)
        p = cartesian_product(u, v)
        for level in range(1, 5):
            expected = product_cut_tuples(p.cut(Fraction(level, 4)))
            assert p.cut_tuples(level) == expected

    def test_zero_cut_of_product_is_product_of_supports(self, rng):
        """Level 0 uses the supports on both sides."""
        box = DomainBox.unit(6)
        u = random_normal(box, 4, rng)
        v = random_normal(box, 4, rng)
        p = cartesian_product(u, v)
        assert p.cut_tuples(0) == product_cut_tuples([u.support(), v.support()])

    def test_incompatible_factors_raise(self, line16):
        """Factors must share box and levels."""
        with pytest.raises(GridMismatchError):
            cartesian_product(FuzzyGrid.full(line16, 4), FuzzyGrid.full(DomainBox.unit(8), 4))


class TestRandomNormal:
    """Tests for random_normal."""

    def test_is_normal(self, rng):
        """Random sets always reach level L."""
        box = DomainBox.unit(7, 5)
        for _ in range(10):
            u = random_normal(box, 9, rng, density=0.1)
            assert u.is_normal()
            assert u.levels == 9
