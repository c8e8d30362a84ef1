"""Hausdorff distance on cell sets and the d∞ metric on fuzzy grids."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import GridMismatchError
from .grid import CrispCellSet, FuzzyGrid, FuzzyGridProduct, check_compatible

logger = logging.getLogger(__name__)

# Operand-size product above which the distance transform replaces the pairwise matrix
DEFAULT_BRUTEFORCE_THRESHOLD = 1_000_000

# Configurable threshold (set by the entry point on startup)
_bruteforce_threshold: int = DEFAULT_BRUTEFORCE_THRESHOLD


def set_bruteforce_threshold(pairs: int) -> None:
    """Set the |A|·|B| size above which Hausdorff uses the accelerated path.

    Args:
        pairs: Maximum number of cell pairs evaluated by brute force
    """
    global _bruteforce_threshold
    _bruteforce_threshold = pairs


def get_bruteforce_threshold() -> int:
    """Get the current brute-force size limit."""
    return _bruteforce_threshold


@dataclass(frozen=True)
class HausdorffResult:
    """Distance plus the pair of cells realizing the max-min."""

    value: float
    witness: tuple[int, int]

    def __float__(self) -> float:
        return self.value


def _nearest_bruteforce(a: np.ndarray, b: np.ndarray, box) -> tuple[np.ndarray, np.ndarray]:
    dist = box.cell_distances(a, b)
    nearest = np.argmin(dist, axis=1)
    return dist[np.arange(len(a)), nearest], b[nearest]


def _nearest_accelerated(a: np.ndarray, target: CrispCellSet) -> tuple[np.ndarray, np.ndarray]:
    box = target.box
    if box.wrap:
        # Periodic nearest neighbours on cell coordinates scaled to physical widths
        b = target.indices
        tree = cKDTree(box.index_coords[b] * box.widths, boxsize=np.asarray(box.cells) * box.widths)
        _, nearest = tree.query(box.index_coords[a] * box.widths)
        nearest_cells = b[nearest]
    else:
        features = ~target.mask.reshape(box.cells)
        indices = ndimage.distance_transform_edt(
            features, sampling=box.widths, return_distances=False, return_indices=True
        )
        flat = np.ravel_multi_index(tuple(ix.reshape(-1) for ix in indices), box.cells)
        nearest_cells = flat[a]
    return box.paired_distances(a, nearest_cells), nearest_cells


def _directed(source: CrispCellSet, target: CrispCellSet, accelerated: bool | None) -> HausdorffResult:
    a = source.indices
    b = target.indices
    if accelerated is None:
        accelerated = len(a) * len(b) > _bruteforce_threshold
    if accelerated:
        logger.debug("directed Hausdorff via distance transform (%d x %d cells)", len(a), len(b))
        dist, nearest = _nearest_accelerated(a, target)
    else:
        dist, nearest = _nearest_bruteforce(a, b, source.box)
    worst = int(np.argmax(dist))
    return HausdorffResult(float(dist[worst]), (int(a[worst]), int(nearest[worst])))


def _check_operands(a: CrispCellSet, b: CrispCellSet) -> None:
    if a.box != b.box:
        raise GridMismatchError("cell sets live on different boxes")
    a.require_nonempty("first Hausdorff operand")
    b.require_nonempty("second Hausdorff operand")


def directed_hausdorff(a: CrispCellSet, b: CrispCellSet, accelerated: bool | None = None) -> HausdorffResult:
    """One-sided excess sup_{x∈A} inf_{y∈B} d(x, y)."""
    _check_operands(a, b)
    return _directed(a, b, accelerated)


def hausdorff(a: CrispCellSet, b: CrispCellSet, accelerated: bool | None = None) -> HausdorffResult:
    """Two-sided Hausdorff distance between nonempty cell sets, over cell centers.

    Args:
        a: First cell set
        b: Second cell set
        accelerated: Force the distance-transform path (True), the pairwise
            path (False), or choose by operand size (None)

    Raises:
        EmptySetError: If either operand is empty
    """
    _check_operands(a, b)
    forward = _directed(a, b, accelerated)
    backward = _directed(b, a, accelerated)
    if backward.value > forward.value:
        return HausdorffResult(backward.value, (backward.witness[1], backward.witness[0]))
    return forward


def _breakpoints(*grids: FuzzyGrid) -> np.ndarray:
    """Levels where some cut changes; the max over all levels is attained on them."""
    values = np.unique(np.concatenate([g.values for g in grids]))
    return values[values > 0]


def d_infty(u: FuzzyGrid, v: FuzzyGrid) -> float:
    """sup over α ∈ (0,1] of h([u]^α, [v]^α); the α = 0 term is the limit of the others.

    Raises:
        NotNormalError: If either operand is not normal
    """
    check_compatible(u, v)
    u.require_normal("first d∞ operand")
    v.require_normal("second d∞ operand")
    best = 0.0
    for level in _breakpoints(u, v):
        cu = CrispCellSet(u.box, u.values >= level)
        cv = CrispCellSet(v.box, v.values >= level)
        best = max(best, hausdorff(cu, cv).value)
    return best


def d_infty_m(us: Sequence[FuzzyGrid], vs: Sequence[FuzzyGrid]) -> float:
    """Max-product metric on m-tuples: max_i d∞(u_i, v_i)."""
    if len(us) != len(vs):
        raise ValueError(f"tuple lengths differ: {len(us)} vs {len(vs)}")
    if not us:
        raise ValueError("empty tuples")
    return max(d_infty(u, v) for u, v in zip(us, vs))


# ==================== Product spaces (max metric) ====================


def product_hausdorff(a: Sequence[CrispCellSet], b: Sequence[CrispCellSet]) -> float:
    """Hausdorff distance between A_0×...×A_{m-1} and B_0×...×B_{m-1} under the max metric.

    Enumerates every tuple of both products; meant for small sets.
    """
    if len(a) != len(b):
        raise ValueError("products of different degree")
    for x, y in zip(a, b):
        _check_operands(x, y)
    m = len(a)
    # Axes 0..m-1 index tuples of A, axes m..2m-1 tuples of B
    full = None
    for i, (x, y) in enumerate(zip(a, b)):
        dist = x.box.cell_distances(x.indices, y.indices)
        shape = [1] * (2 * m)
        shape[i] = dist.shape[0]
        shape[m + i] = dist.shape[1]
        dist = dist.reshape(shape)
        full = dist if full is None else np.maximum(full, dist)
    a_axes = tuple(range(m))
    b_axes = tuple(range(m, 2 * m))
    forward = full.min(axis=b_axes).max()
    backward = full.min(axis=a_axes).max()
    return float(max(forward, backward))


def d_infty_product(p: FuzzyGridProduct, q: FuzzyGridProduct) -> float:
    """d∞ between two products, computed on the product space level by level."""
    if p.degree != q.degree:
        raise ValueError("products of different degree")
    check_compatible(*p.factors, *q.factors)
    if not (p.is_normal() and q.is_normal()):
        raise ValueError("products must be normal")
    best = 0.0
    for level in _breakpoints(*p.factors, *q.factors):
        cuts_p = [CrispCellSet(f.box, f.values >= level) for f in p.factors]
        cuts_q = [CrispCellSet(f.box, f.values >= level) for f in q.factors]
        best = max(best, product_hausdorff(cuts_p, cuts_q))
    return best
