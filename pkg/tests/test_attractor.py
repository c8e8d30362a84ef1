"""Tests for attractor iteration, collage bounds, cut comparison and approximation."""

import numpy as np
import pytest

from gifzs.attractor import (
    apply_diagonal,
    approximate_gifzs,
    approximate_ifzs,
    collage,
    compare_cuts,
    default_seeds,
    iterate_attractor,
    monotone_iterate,
)
from gifzs.errors import EpsilonTooSmallError, GridMismatchError, NotNormalError
from gifzs.fuzzification import Gifzs, lift_degree
from gifzs.grey import GreySystem, check_proper, identity
from gifzs.grid import CrispCellSet, DomainBox, FuzzyGrid, cut_at_level, indicator
from gifzs.metrics import d_infty, directed_hausdorff, hausdorff
from gifzs.systems import AffineContraction, CrispGifs, crisp_attractor, map_cellset
from tests.conftest import CANTOR_27, make_cantor, make_quarter_sum, random_grid, random_system


def square_target() -> FuzzyGrid:
    box = DomainBox.unit(16, 16)
    values = np.zeros((16, 16), dtype=np.int32)
    values[4:12, 4:12] = 4
    values[6:10, 6:10] = 8
    return FuzzyGrid(box, values.reshape(-1), 8)


def flip_system() -> Gifzs:
    """x ↦ 3/4 − x/2 on four cells: the lattice image swaps cells 1 and 2."""
    box = DomainBox.unit(4)
    f = AffineContraction((np.array([[-0.5]]),), np.array([0.75]))
    return Gifzs(CrispGifs(box, (f,)), GreySystem((identity(8),)))


def with_identity_greys(system: Gifzs) -> Gifzs:
    greys = GreySystem(tuple(identity(system.levels) for _ in system.gifs.maps))
    return Gifzs(system.gifs, greys)


def fixed_cell(system: Gifzs) -> int | None:
    """A cell some top map sends to itself on the lattice, if any."""
    box = system.box
    for j in system.greys.top_indices():
        f = system.gifs.maps[j]
        for c in range(box.size):
            single = CrispCellSet.from_cells(box, [c])
            if map_cellset(f, *[single] * system.degree).cells == {c}:
                return c
    return None


class TestIterateAttractor:
    """Tests for iterate_attractor."""

    def test_cantor_is_crisp(self, cantor):
        """Identity greys give the indicator of the Cantor cells."""
        run = iterate_attractor(cantor, tol=0)
        assert run.collapsed_exact
        assert run.status == "exact"
        assert run.iterations == 4
        assert run.attractor == indicator(CrispCellSet.from_cells(cantor.box, CANTOR_27), 8)

    def test_non_crisp_cantor(self, non_crisp_cantor):
        """Halving the right copy leaves levels strictly between 0 and 1."""
        run = iterate_attractor(non_crisp_cantor, tol=0)
        u = run.attractor
        assert run.collapsed_exact
        assert u.support().cells == CANTOR_27
        assert cut_at_level(u, 8).cells == {0}
        assert u.values[8] == 2
        assert u.values[26] == 1

    def test_doubling_fills_circle(self, doubling):
        """The circle doubling system covers the whole circle."""
        run = iterate_attractor(doubling, tol=0)
        assert run.collapsed_exact
        assert np.all(run.attractor.values == 8)

    def test_degree_two_fixed_point(self):
        """An exact run satisfies u = 𝒵(u, u)."""
        system = make_quarter_sum()
        run = iterate_attractor(system, tol=0)
        assert run.collapsed_exact
        assert apply_diagonal(system, run.attractor) == run.attractor

    def test_boundary_grey_collapses_to_origin(self):
        """With ρ_1 ≡ 0 only the contraction towards 0 survives."""
        system = make_quarter_sum(boundary=True)
        run = iterate_attractor(system, seeds=[FuzzyGrid.full(system.box, 8)] * 2, tol=0)
        assert run.collapsed_exact
        assert run.attractor == indicator(CrispCellSet.from_cells(system.box, [0]), 8)

    def test_operators_agree(self, non_crisp_cantor):
        """Both operator implementations reach the same attractor."""
        a = iterate_attractor(non_crisp_cantor, operator="suppush", tol=0)
        b = iterate_attractor(non_crisp_cantor, operator="levelset", tol=0)
        assert a.attractor == b.attractor
        assert b.operator == "levelset"

    def test_tolerance_stop(self):
        """A positive tolerance stops before the exact fixed point when changes are small."""
        big = make_cantor(cells=243)
        run = iterate_attractor(big, tol=0.05)
        assert run.converged
        assert run.decay[-1] <= 0.05
        assert run.tol == 0.05

    def test_max_iter(self, cantor):
        """A capped run reports itself unconverged."""
        run = iterate_attractor(cantor, max_iter=1)
        assert not run.converged
        assert run.status == "unconverged"
        assert run.iterations == 1

    def test_default_seeds(self, doubling):
        """m copies of the middle-cell indicator."""
        seeds = default_seeds(doubling)
        assert len(seeds) == 2
        assert seeds[0].support().cells == {8}

    def test_seed_errors(self, cantor, doubling):
        """Seeds are checked for count, grid and normality."""
        with pytest.raises(ValueError, match="expected 2 seeds"):
            iterate_attractor(doubling, seeds=[FuzzyGrid.full(doubling.box, 8)])
        with pytest.raises(GridMismatchError):
            iterate_attractor(cantor, seeds=[FuzzyGrid.full(cantor.box, 4)])
        with pytest.raises(NotNormalError):
            iterate_attractor(cantor, seeds=[FuzzyGrid(cantor.box, np.ones(27), 8)])

    def test_attractor_independent_of_seed(self, rng, non_crisp_cantor):
        """Any normal seed leads to the same attractor."""
        reference = iterate_attractor(non_crisp_cantor, tol=0).attractor
        for _ in range(3):
            values = rng.integers(0, 9, size=27)
            values[rng.integers(27)] = 8
            seed = FuzzyGrid(non_crisp_cantor.box, values, 8)
            assert iterate_attractor(non_crisp_cantor, seeds=[seed], tol=0).attractor == reference

    def test_lattice_cycle_reported_without_tolerance(self):
        """An exact-only run on a two-cell lattice cycle stops as a cycle, unconverged."""
        system = flip_system()
        run = iterate_attractor(system, tol=0)
        assert run.status == "cycle"
        assert run.cycle_length == 2
        assert run.iterations == 2
        assert not run.converged
        assert run.attractor.support().cells == {2}

    def test_default_tolerance_is_one_cell_diagonal(self):
        """The same cycle converges under the default tolerance of one cell diagonal."""
        system = flip_system()
        run = iterate_attractor(system)
        assert run.tol == system.box.diagonal == 0.25
        assert run.status == "converged"
        assert run.iterations == 1
        assert run.decay == [pytest.approx(0.25)]

    @pytest.mark.parametrize("cells,degree", [((12,), 1), ((12,), 2), ((5, 5), 1), ((5, 5), 2)])
    def test_identity_greys_give_crisp_indicator(self, rng, cells, degree):
        """With every ρ_j = id each random system's attractor is the indicator of A_S."""
        for _ in range(10):
            system = with_identity_greys(random_system(rng, cells=cells, degree=degree))
            run = iterate_attractor(system, max_iter=200, tol=0)
            crisp = crisp_attractor(system.gifs, max_iter=200)
            assert run.attractor == indicator(crisp.attractor, system.levels)
            assert run.iterations == crisp.iterations
            assert hausdorff(run.attractor.support(), crisp.attractor).value <= system.box.diagonal

    @pytest.mark.parametrize("degree", [1, 2])
    def test_lifted_attractor_unchanged(self, rng, degree):
        """Lifting m to m + 1 keeps the attractor of ten exact runs."""
        checked = 0
        for _ in range(100):
            system = random_system(rng, cells=(12,), degree=degree)
            base = iterate_attractor(system, max_iter=500, tol=0)
            if not base.collapsed_exact:
                continue
            lifted = iterate_attractor(lift_degree(system), max_iter=500, tol=0)
            assert lifted.collapsed_exact
            assert lifted.attractor == base.attractor
            assert base.iterations <= lifted.iterations <= base.iterations + 1
            checked += 1
            if checked == 10:
                break
        assert checked == 10


class TestCollage:
    """Tests for the collage bound."""

    def test_fixed_point_has_zero_residual(self, cantor):
        """The attractor is its own image."""
        u = iterate_attractor(cantor, tol=0).attractor
        report = collage(cantor, u, u)
        assert report.residual == 0.0
        assert report.bound == 0.0
        assert report.holds

    def test_bound_holds_for_full_set(self, cantor):
        """d∞(u, u_𝒵) ≤ d∞(u, 𝒵(u)) / (1 − λ)."""
        attractor = iterate_attractor(cantor, tol=0).attractor
        full = FuzzyGrid.full(cantor.box, 8)
        report = collage(cantor, full, attractor)
        assert report.residual == pytest.approx(5 / 27)
        assert report.bound == pytest.approx(report.residual / (1 - 1 / 3))
        assert report.actual == pytest.approx(d_infty(full, attractor))
        assert report.holds

    def test_without_attractor(self, cantor):
        """No attractor means no verdict."""
        assert collage(cantor, FuzzyGrid.full(cantor.box, 8)).holds is None

    def test_bound_over_random_grids(self, rng):
        """Fifty random grids per system respect the bound up to two cell diagonals."""
        systems = 0
        for _ in range(200):
            system = random_system(rng, cells=(12,), degree=int(rng.integers(1, 3)))
            if system.lipschitz > 0.5:
                continue
            attractor = iterate_attractor(system, max_iter=200, tol=0)
            if not attractor.collapsed_exact:
                continue
            slack = 2 * system.box.diagonal
            for _ in range(50):
                report = collage(system, random_grid(rng, system.box, system.levels), attractor.attractor)
                assert report.actual <= report.bound + slack + 1e-12
            systems += 1
            if systems == 3:
                break
        assert systems == 3


class TestMonotone:
    """Tests for monotone iteration."""

    def test_full_set_decreases(self, cantor):
        """Starting from the universe the iterates shrink to the attractor."""
        result = monotone_iterate(cantor, FuzzyGrid.full(cantor.box, 8), tol=0)
        assert result.direction == "nonincreasing"
        assert result.monotone
        assert result.bounded
        assert result.run.attractor == iterate_attractor(cantor, tol=0).attractor

    def test_incomparable_seed(self, cantor):
        """A single interior cell is not comparable with its image."""
        result = monotone_iterate(cantor, indicator(CrispCellSet.from_cells(cantor.box, [13]), 8))
        assert not result.comparable
        assert result.run is None

    def test_attractor_is_both(self, non_crisp_cantor):
        """At the fixed point the image is below the seed."""
        u = iterate_attractor(non_crisp_cantor, tol=0).attractor
        result = monotone_iterate(non_crisp_cantor, u, tol=0)
        assert result.direction == "nonincreasing"
        assert result.run.attractor == u

    def test_random_systems_stay_ordered(self, rng):
        """From the universe iterates shrink; from a cell a top map fixes they grow."""
        runs = 0
        for _ in range(100):
            system = random_system(rng, cells=(12,), degree=int(rng.integers(1, 3)))
            shrinking = monotone_iterate(system, FuzzyGrid.full(system.box, system.levels), tol=0)
            assert shrinking.direction == "nonincreasing"
            assert shrinking.monotone
            assert shrinking.bounded
            runs += 1
            cell = fixed_cell(system)
            if cell is not None:
                seed = indicator(CrispCellSet.from_cells(system.box, [cell]), system.levels)
                growing = monotone_iterate(system, seed, tol=0)
                assert growing.comparable
                assert growing.monotone
                assert growing.bounded
                runs += 1
            if runs >= 20:
                break
        assert runs >= 20


class TestCompareCuts:
    """Tests for the crisp versus fuzzy attractor relations."""

    def test_crisp_greys(self, cantor):
        """Identity greys make the attractor the indicator of A_S."""
        report = compare_cuts(cantor, iterate_attractor(cantor, tol=0))
        assert report.all_top
        assert report.crisp
        assert report.ok
        assert report.full_system.attractor.cells == CANTOR_27

    def test_non_crisp_cuts(self, non_crisp_cantor):
        """0-cut equals A_S and 1-cut equals A_S' for the halving system."""
        report = compare_cuts(non_crisp_cantor, iterate_attractor(non_crisp_cantor, tol=0))
        assert report.zero_cut_equality_expected
        assert report.one_cut_equality_expected
        assert not report.all_top
        assert not report.crisp
        assert report.zero_cut_distance == 0.0
        assert report.one_cut_distance == 0.0
        assert report.top_system.attractor.cells == {0}
        assert report.failures() == []

    def test_unconverged_run_rejected(self, cantor):
        """Cut comparison needs a converged run."""
        with pytest.raises(ValueError, match="converged"):
            compare_cuts(cantor, iterate_attractor(cantor, max_iter=1))

    def test_zero_cut_inside_crisp_attractor(self, rng):
        """supp u_𝒵 stays within one cell diagonal of A_S, and matches it for proper greys."""
        checked = 0
        for _ in range(200):
            system = random_system(rng, cells=(12,), degree=int(rng.integers(1, 3)), maps=3)
            run = iterate_attractor(system, max_iter=200, tol=0)
            crisp = crisp_attractor(system.gifs, max_iter=200)
            if not (run.collapsed_exact and crisp.exact):
                continue
            diagonal = system.box.diagonal
            support = run.attractor.support()
            assert directed_hausdorff(support, crisp.attractor).value <= diagonal
            if check_proper(system.greys).proper:
                assert hausdorff(support, crisp.attractor).value <= diagonal
            checked += 1
            if checked == 20:
                break
        assert checked == 20


class TestApproximation:
    """Tests for approximating a target by an attractor."""

    def test_within_epsilon(self):
        """The attractor lies within ε of the target."""
        target = square_target()
        system, certificate = approximate_ifzs(target, 0.5)
        assert system.degree == 1
        assert len(system) == len(certificate.centers)
        assert certificate.scale < 0.5
        assert certificate.within_epsilon
        assert certificate.distance == pytest.approx(d_infty(target, certificate.run.attractor))

    def test_centers_cover_support(self):
        """Every support cell is within ε/4 of a center."""
        target = square_target()
        _, certificate = approximate_ifzs(target, 0.5, compute_attractor=False)
        box = target.box
        distances = box.cell_distances(target.support().indices, np.array(certificate.centers))
        assert np.all(distances.min(axis=1) <= 0.5 / 4)
        assert certificate.within_epsilon is None

    def test_lifted_degree(self):
        """Higher degrees lift the degree-1 system."""
        system, certificate = approximate_gifzs(square_target(), 0.5, degree=3, compute_attractor=False)
        assert system.degree == 3
        assert certificate.run is None

    def test_epsilon_too_small(self):
        """ε must exceed four cell diagonals."""
        with pytest.raises(EpsilonTooSmallError):
            approximate_ifzs(square_target(), 0.3)

    def test_target_must_be_normal(self):
        """Non-normal targets are rejected."""
        box = DomainBox.unit(16, 16)
        with pytest.raises(NotNormalError):
            approximate_ifzs(FuzzyGrid(box, np.ones(256), 8), 0.5)

    def test_bad_degree(self):
        """Degree must be positive."""
        with pytest.raises(ValueError, match="degree"):
            approximate_gifzs(square_target(), 0.5, degree=0)

    def test_random_line_targets(self, rng):
        """Ten random targets on 128 cells are approximated within ε = 0.1."""
        box = DomainBox.unit(128)
        for _ in range(10):
            target = random_grid(rng, box, 255)
            _, certificate = approximate_ifzs(target, 0.1)
            assert certificate.within_epsilon
            assert certificate.distance < 0.1 + 2 * box.diagonal
            assert certificate.collage.residual <= 0.1 / 2 + box.diagonal + 1e-12
