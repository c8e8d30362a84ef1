"""Fixed-point driver for the fuzzy operator and the theorems built on its attractor."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import EpsilonTooSmallError, GridMismatchError
from .fuzzification import Gifzs, get_operator, lift_degree
from .grey import GreySystem, step
from .grid import CrispCellSet, FuzzyGrid, cut_at_level, indicator
from .metrics import d_infty, directed_hausdorff, hausdorff
from .systems import (
    AffineContraction,
    CrispGifs,
    CrispRun,
    MapStats,
    crisp_attractor,
    default_max_iter,
    iterate_recurrence,
)
from .validators import validate_epsilon

logger = logging.getLogger(__name__)

# Margin kept below 1/2 for the contraction factor of approximating maps
APPROXIMATION_MARGIN = 1e-3


@dataclass
class AttractorRun:
    """Result of iterating u_{k+m} = 𝒵(u_{k+m-1}, ..., u_k)."""

    attractor: FuzzyGrid
    iterations: int
    decay: list[float]
    converged: bool
    collapsed_exact: bool
    cycle_length: int | None = None
    clamped: int = 0
    tol: float = 0.0
    operator: str = "suppush"

    @property
    def status(self) -> str:
        if self.collapsed_exact:
            return "exact"
        if self.converged:
            return "converged"
        if self.cycle_length is not None:
            return "cycle"
        return "unconverged"


def default_seeds(system: Gifzs) -> list[FuzzyGrid]:
    """m copies of the indicator of the middle cell."""
    box = system.box
    seed = indicator(CrispCellSet.from_cells(box, [box.center_cell()]), system.levels)
    return [seed] * system.degree


def _check_seeds(system: Gifzs, seeds: Sequence[FuzzyGrid]) -> list[FuzzyGrid]:
    seeds = list(seeds)
    if len(seeds) != system.degree:
        raise ValueError(f"expected {system.degree} seeds, got {len(seeds)}")
    for i, u in enumerate(seeds):
        if u.box != system.box or u.levels != system.levels:
            raise GridMismatchError(f"seed {i} does not match the system's box and levels")
        u.require_normal(f"seed {i}")
    return seeds


def iterate_attractor(
    system: Gifzs,
    seeds: Sequence[FuzzyGrid] | None = None,
    max_iter: int | None = None,
    tol: float | None = None,
    operator: str = "suppush",
    on_step: Callable[[int, FuzzyGrid, list], None] | None = None,
) -> AttractorRun:
    """Iterate the fuzzy operator to its attractor u_𝒵.

    Each step first checks for an exact lattice fixed point, then for a d∞
    window change ≤ tol (tol > 0). A detected lattice cycle or ``max_iter``
    steps end the run with ``converged=False``.

    Args:
        system: The fuzzy system
        seeds: m normal seeds, oldest first (default: indicators of the middle cell)
        max_iter: Iteration cap (default derived from λ and the grid)
        tol: d∞ stopping tolerance (default one cell diagonal); 0 means exact fixed point only
        operator: ``suppush`` or ``levelset``
        on_step: Called as on_step(k, new iterate, previous window)
    """
    seeds = _check_seeds(system, seeds) if seeds is not None else default_seeds(system)
    if tol is None:
        tol = system.box.diagonal
    if max_iter is None:
        max_iter = default_max_iter(system.lipschitz, system.box, system.degree, system.levels)
    apply = get_operator(operator)
    stats = MapStats()
    run = iterate_recurrence(
        lambda *us: apply(system, *us, stats=stats),
        seeds,
        d_infty,
        max_iter,
        tol,
        on_step,
    )
    if stats.clamped:
        logger.warning("%d image points fell outside the box and were clamped", stats.clamped)
    logger.info("attractor run: %d iterations, converged=%s", run.iterations, run.converged)
    return AttractorRun(
        attractor=run.final,
        iterations=run.iterations,
        decay=run.decay,
        converged=run.converged,
        collapsed_exact=run.exact,
        cycle_length=run.cycle_length,
        clamped=stats.clamped,
        tol=tol,
        operator=operator,
    )


def apply_diagonal(system: Gifzs, u: FuzzyGrid, operator: str = "suppush") -> FuzzyGrid:
    """𝒵(u, ..., u)."""
    return get_operator(operator)(system, *([u] * system.degree))


# ==================== Collage bound ====================


@dataclass(frozen=True)
class CollageReport:
    """Collage estimate d∞(u, u_𝒵) ≤ d∞(u, 𝒵(u,...,u)) / (1 − λ)."""

    residual: float
    lipschitz: float
    bound: float
    actual: float | None = None
    slack: float = 0.0

    @property
    def holds(self) -> bool | None:
        """Whether the measured distance respects the bound; None without an attractor."""
        if self.actual is None:
            return None
        return self.actual <= self.bound + self.slack


def quantization_slack(system: Gifzs) -> float:
    """Grid slack for inequalities passing through a fixed point: max(2, 1/(1−λ)) cell diagonals."""
    return max(2.0, 1.0 / (1.0 - system.lipschitz)) * system.box.diagonal


def collage(
    system: Gifzs, u: FuzzyGrid, attractor: FuzzyGrid | None = None, operator: str = "suppush"
) -> CollageReport:
    """Evaluate the collage bound for u, and check it against ``attractor`` when given."""
    lam = system.lipschitz
    if lam >= 1:
        raise ValueError(f"collage bound needs λ < 1, got {lam:.6g}")
    residual = d_infty(u, apply_diagonal(system, u, operator))
    actual = d_infty(u, attractor) if attractor is not None else None
    return CollageReport(
        residual=residual,
        lipschitz=lam,
        bound=residual / (1.0 - lam),
        actual=actual,
        slack=quantization_slack(system),
    )


# ==================== Monotone sequences ====================


@dataclass
class MonotoneRun:
    """Iteration from (v, ..., v) when 𝒵(v,...,v) is comparable with v.

    ``direction`` is ``nonincreasing`` (𝒵(v,...,v) ≤ v), ``nondecreasing``
    (𝒵(v,...,v) ≥ v) or ``not-comparable``; ``monotone`` records whether every
    iterate kept that order and ``bounded`` whether the final iterate stayed
    on the same side of v.
    """

    direction: str
    monotone: bool
    bounded: bool
    run: AttractorRun | None = None

    @property
    def comparable(self) -> bool:
        return self.direction != "not-comparable"


def monotone_iterate(
    system: Gifzs,
    v: FuzzyGrid,
    max_iter: int | None = None,
    operator: str = "suppush",
    tol: float | None = None,
) -> MonotoneRun:
    """Run the recurrence from (v, ..., v) and check the order of the iterates."""
    v.require_normal("monotone seed")
    first = apply_diagonal(system, v, operator)
    if first <= v:
        direction = "nonincreasing"

        def ordered(new: FuzzyGrid, old: FuzzyGrid) -> bool:
            return new <= old

    elif first >= v:
        direction = "nondecreasing"

        def ordered(new: FuzzyGrid, old: FuzzyGrid) -> bool:
            return new >= old

    else:
        return MonotoneRun("not-comparable", monotone=False, bounded=False)

    violations: list[int] = []

    def check(k: int, new: FuzzyGrid, window: list) -> None:
        if not ordered(new, window[-1]):
            violations.append(k)

    run = iterate_attractor(
        system, [v] * system.degree, max_iter=max_iter, tol=tol, operator=operator, on_step=check
    )
    if violations:
        logger.warning("iterates lost their order at steps %s", violations[:5])
    return MonotoneRun(direction, monotone=not violations, bounded=ordered(run.attractor, v), run=run)


# ==================== Crisp versus fuzzy attractors ====================


@dataclass(frozen=True)
class CutComparison:
    """Relations between the attractor's extreme cuts and the crisp attractors A_𝒮 and A_𝒮′.

    Distances are Hausdorff distances between cell sets; ``tolerance`` is one
    cell diagonal. ``*_expected`` flags say whether the system's grey maps
    promise equality (and not only containment).
    """

    zero_cut_excess: float
    zero_cut_distance: float
    zero_cut_equality_expected: bool
    one_cut_deficit: float
    one_cut_distance: float
    one_cut_equality_expected: bool
    all_top: bool
    crisp: bool
    tolerance: float
    full_system: CrispRun = field(repr=False)
    top_system: CrispRun = field(repr=False)

    @property
    def zero_cut_contained(self) -> bool:
        return self.zero_cut_excess <= self.tolerance

    @property
    def one_cut_contains(self) -> bool:
        return self.one_cut_deficit <= self.tolerance

    def failures(self) -> list[str]:
        """Human-readable list of relations that do not hold."""
        out = []
        if not self.zero_cut_contained:
            out.append(f"0-cut leaves A_S by {self.zero_cut_excess:.6g}")
        if self.zero_cut_equality_expected and self.zero_cut_distance > self.tolerance:
            out.append(f"0-cut differs from A_S by {self.zero_cut_distance:.6g}")
        if not self.one_cut_contains:
            out.append(f"A_S' leaves the 1-cut by {self.one_cut_deficit:.6g}")
        if self.one_cut_equality_expected and self.one_cut_distance > self.tolerance:
            out.append(f"1-cut differs from A_S' by {self.one_cut_distance:.6g}")
        if self.all_top and not self.crisp:
            out.append("every grey map reaches 1 but the attractor is not the indicator of A_S")
        return out

    @property
    def ok(self) -> bool:
        return not self.failures()


def compare_cuts(system: Gifzs, run: AttractorRun, max_iter: int | None = None) -> CutComparison:
    """Compare [u_𝒵]^0 with A_𝒮 and [u_𝒵]^1 with A_𝒮′.

    Containment [u_𝒵]^0 ⊆ A_𝒮 and A_𝒮′ ⊆ [u_𝒵]^1 always hold. The 0-cut equals
    A_𝒮 when every r₊ is minimal, the 1-cut equals A_𝒮′ when β_j(1) = 1 for
    every top map, and u_𝒵 = χ_{A_𝒮} when every grey map reaches 1.
    """
    if not run.converged:
        raise ValueError("cut comparison needs a converged run")
    top = system.greys.top_indices()
    if not top:
        raise ValueError("no grey map reaches 1")
    u = run.attractor
    levels = system.levels
    tolerance = system.box.diagonal

    full = crisp_attractor(system.gifs, max_iter=max_iter)
    prime = crisp_attractor(system.top_subsystem(), max_iter=max_iter)
    zero_cut = u.support()
    one_cut = cut_at_level(u, levels)

    all_top = len(top) == len(system)
    crisp = all_top and bool(np.all((u.values == 0) | (u.values == levels)))
    crisp = crisp and hausdorff(zero_cut, full.attractor).value <= tolerance

    return CutComparison(
        zero_cut_excess=directed_hausdorff(zero_cut, full.attractor).value,
        zero_cut_distance=hausdorff(zero_cut, full.attractor).value,
        zero_cut_equality_expected=all(rho.r_plus() <= 1 for rho in system.greys),
        one_cut_deficit=directed_hausdorff(prime.attractor, one_cut).value,
        one_cut_distance=hausdorff(prime.attractor, one_cut).value,
        one_cut_equality_expected=all(system.greys[j].beta(levels) == levels for j in top),
        all_top=all_top,
        crisp=crisp,
        tolerance=tolerance,
        full_system=full,
        top_system=prime,
    )


# ==================== Density: approximating a target ====================


@dataclass(frozen=True)
class DensityCertificate:
    """Parameters of an approximating system and the distances that certify it.

    ``centers`` are the cover cells x_j, ``scale`` the common contraction
    factor s, ``centroid`` the support centroid x̄ and ``diameter`` the bound
    on diam(supp) used to choose s. The attractor is within ε (plus two cell
    diagonals of grid slack) of the target.
    """

    epsilon: float
    centers: tuple[int, ...]
    scale: float
    centroid: tuple[float, ...]
    diameter: float
    diagonal: float
    collage: CollageReport
    run: AttractorRun | None = field(default=None, repr=False)

    @property
    def distance(self) -> float | None:
        """d∞(target, u_𝒵) when the attractor was computed."""
        return self.collage.actual

    @property
    def within_epsilon(self) -> bool | None:
        if self.collage.actual is None:
            return None
        return self.collage.actual < self.epsilon + 2 * self.diagonal


def _greedy_cover(target: FuzzyGrid, radius: float) -> list[int]:
    box = target.box
    support = target.support().indices
    covered = np.zeros(len(support), dtype=bool)
    centers = []
    for pos, cell in enumerate(support):
        if covered[pos]:
            continue
        centers.append(int(cell))
        covered |= box.cell_distances(support, np.array([cell]))[:, 0] <= radius
    return centers


def approximate_ifzs(
    target: FuzzyGrid,
    epsilon: float,
    compute_attractor: bool = True,
    max_iter: int | None = None,
    tol: float = 0.0,
) -> tuple[Gifzs, DensityCertificate]:
    """Build a degree-1 system whose attractor lies within ε of ``target``.

    Cover supp(target) greedily (index order) by balls of radius ε/4 around
    support cells x_j. Map j is f_j(x) = x_j + s·(x − x̄), with x̄ the support
    centroid and s = min(1/2 − δ, (ε/8)/diam), so f_j(supp) stays within ε/8 of
    x_j. Grey map j is the step α_j·χ_[α_j,1] with α_j the maximum of the
    target over the closed ε/4 ball around x_j.
    The attractor run stops on an exact fixed point unless ``tol`` is positive.

    Raises:
        NotNormalError: If the target is not normal
        EpsilonTooSmallError: If ε ≤ 4 cell diagonals
    """
    target.require_normal("approximation target")
    box = target.box
    minimum = 4 * box.diagonal
    ok, error = validate_epsilon(epsilon, minimum)
    if not ok:
        logger.debug("rejected approximation: %s", error)
        raise EpsilonTooSmallError(epsilon, minimum)
    radius = epsilon / 4

    centers = _greedy_cover(target, radius)
    support = target.support().indices
    points = box.centers[support]
    centroid = points.mean(axis=0)
    # Plain coordinates even on a torus: the maps act on representatives in [lo, hi)
    diameter = float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))
    s = 0.5 - APPROXIMATION_MARGIN
    if diameter > 0:
        s = min(s, (epsilon / 8) / diameter)

    all_cells = np.arange(box.size)
    maps = []
    greys = []
    for cell in centers:
        x_j = box.centers[cell]
        ball = box.cell_distances(all_cells, np.array([cell]))[:, 0] <= radius
        alpha = int(target.values[ball].max())
        maps.append(AffineContraction((s * np.eye(box.dim),), x_j - s * centroid))
        greys.append(step(alpha / target.levels, target.levels))
    system = Gifzs(CrispGifs(box, tuple(maps)), GreySystem(tuple(greys)))
    logger.info("approximation: %d maps, scale %.6g", len(maps), s)

    run = iterate_attractor(system, max_iter=max_iter, tol=tol) if compute_attractor else None
    report = collage(system, target, run.attractor if run is not None else None)
    certificate = DensityCertificate(
        epsilon=epsilon,
        centers=tuple(centers),
        scale=s,
        centroid=tuple(float(x) for x in centroid),
        diameter=diameter,
        diagonal=box.diagonal,
        collage=report,
        run=run,
    )
    return system, certificate


def approximate_gifzs(
    target: FuzzyGrid,
    epsilon: float,
    degree: int,
    compute_attractor: bool = True,
    max_iter: int | None = None,
    tol: float = 0.0,
) -> tuple[Gifzs, DensityCertificate]:
    """Degree-m approximation: the degree-1 system lifted m−1 times.

    Lifting leaves the attractor unchanged, so the degree-1 certificate applies.
    """
    if degree < 1:
        raise ValueError(f"degree must be positive, got {degree}")
    system, certificate = approximate_ifzs(target, epsilon, compute_attractor, max_iter, tol)
    for _ in range(degree - 1):
        system = lift_degree(system)
    return system, certificate
