"""Discretized fuzzy sets on uniform grids.

A fuzzy set is stored as one integer grey level per grid cell; membership is
``level / L``. Crisp sets are boolean masks over the same cells. Every object
here is immutable after construction.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import EmptySetError, GridMismatchError, NonNestedCutsError, NotNormalError, OffLatticeError

logger = logging.getLogger(__name__)

# Default number of grey levels above zero (8-bit images)
DEFAULT_LEVELS = 255

# Slack used when snapping image points to cells and thresholds to the lattice
LATTICE_EPS = 1e-9

# Products larger than this are never materialized
MAX_MATERIALIZED_PRODUCT = 1 << 22


@dataclass(frozen=True)
class DomainBox:
    """Uniform grid of cells over an axis-aligned box.

    Cells are numbered in C order over ``cells``. With ``wrap`` set the box is a
    torus: distances and image points are taken modulo the box extent.
    """

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    cells: tuple[int, ...]
    wrap: bool = False

    def __post_init__(self):
        lo = tuple(float(x) for x in self.lo)
        hi = tuple(float(x) for x in self.hi)
        cells = tuple(int(n) for n in self.cells)
        if not (len(lo) == len(hi) == len(cells)) or not cells:
            raise ValueError("lo, hi and cells must have the same positive length")
        for k, (a, b, n) in enumerate(zip(lo, hi, cells)):
            if not a < b:
                raise ValueError(f"axis {k}: lo {a} must be below hi {b}")
            if n < 1:
                raise ValueError(f"axis {k}: cell count must be positive, got {n}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "wrap", bool(self.wrap))

    @classmethod
    def unit(cls, *cells: int, wrap: bool = False) -> DomainBox:
        """Unit cube [0,1]^d with the given cells per axis."""
        return cls(lo=(0.0,) * len(cells), hi=(1.0,) * len(cells), cells=cells, wrap=wrap)

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def size(self) -> int:
        return math.prod(self.cells)

    @cached_property
    def widths(self) -> np.ndarray:
        return np.array([(b - a) / n for a, b, n in zip(self.lo, self.hi, self.cells)])

    @cached_property
    def diagonal(self) -> float:
        """Length of one cell diagonal, the unit of every discretization slack."""
        return float(np.sqrt(np.sum(self.widths**2)))

    @cached_property
    def index_coords(self) -> np.ndarray:
        """Integer multi-index of every cell, shape (size, dim)."""
        grids = np.indices(self.cells).reshape(self.dim, -1).T
        grids.flags.writeable = False
        return grids

    @cached_property
    def centers(self) -> np.ndarray:
        """Center point of every cell, shape (size, dim)."""
        pts = np.asarray(self.lo) + (self.index_coords + 0.5) * self.widths
        pts.flags.writeable = False
        return pts

    def center_cell(self) -> int:
        """Flat index of the cell at the middle of the box."""
        return int(np.ravel_multi_index(tuple(n // 2 for n in self.cells), self.cells))

    def nearest_cells(self, points: np.ndarray, wrap: bool | None = None) -> tuple[np.ndarray, int]:
        """Snap points to the nearest cell center.

        Ties go to the lower index. Points outside the box are clamped, or
        taken modulo the box extent when wrapping (default: the box's own flag).

        Returns:
            Tuple of (flat cell indices, number of points that fell outside the box)
        """
        wrap = self.wrap if wrap is None else wrap
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        flat = np.zeros(len(points), dtype=np.int64)
        outside = np.zeros(len(points), dtype=bool)
        for k in range(self.dim):
            n = self.cells[k]
            t = (points[:, k] - self.lo[k]) / self.widths[k]
            if wrap:
                t = np.mod(t, n)
            else:
                outside |= (t < -LATTICE_EPS) | (t > n + LATTICE_EPS)
            idx = np.ceil(t - 1.0 - LATTICE_EPS).astype(np.int64)
            if wrap:
                idx = np.mod(idx, n)
            else:
                idx = np.clip(idx, 0, n - 1)
            flat = flat * n + idx
        return flat, int(np.count_nonzero(outside))

    @cached_property
    def width_ratios_sq(self) -> np.ndarray:
        """Squared cell widths relative to axis 0; all ones on square cells."""
        return (self.widths / self.widths[0]) ** 2

    def _offset_distance(self, diffs: list[np.ndarray]) -> np.ndarray:
        # Sum squared index offsets in units of the axis-0 width: on square
        # cells the sum is an exact integer, so equal distances compare equal.
        acc = np.zeros(np.broadcast_shapes(*[d.shape for d in diffs]))
        for k, diff in enumerate(diffs):
            if self.wrap:
                diff = np.minimum(diff, self.cells[k] - diff)
            acc = acc + (diff * diff) * self.width_ratios_sq[k]
        return np.sqrt(acc) * self.widths[0]

    def cell_distances(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Euclidean distances between cell centers, shape (len(a), len(b))."""
        ia = self.index_coords[np.asarray(a, dtype=np.int64)]
        ib = self.index_coords[np.asarray(b, dtype=np.int64)]
        return self._offset_distance([np.abs(ia[:, k, None] - ib[None, :, k]) for k in range(self.dim)])

    def paired_distances(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Distances between a[i] and b[i] for each i."""
        ia = self.index_coords[np.asarray(a, dtype=np.int64)]
        ib = self.index_coords[np.asarray(b, dtype=np.int64)]
        return self._offset_distance([np.abs(ia[:, k] - ib[:, k]) for k in range(self.dim)])


@dataclass(frozen=True, eq=False)
class CrispCellSet:
    """Finite set of grid cells, stored as a boolean mask."""

    box: DomainBox
    mask: np.ndarray

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool).reshape(-1)
        if mask.size != self.box.size:
            raise GridMismatchError(f"mask has {mask.size} cells, box has {self.box.size}")
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_cells(cls, box: DomainBox, cells: Iterable[int]) -> CrispCellSet:
        mask = np.zeros(box.size, dtype=bool)
        idx = np.fromiter((int(c) for c in cells), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= box.size):
            raise ValueError(f"cell index outside 0..{box.size - 1}")
        mask[idx] = True
        return cls(box, mask)

    @classmethod
    def full(cls, box: DomainBox) -> CrispCellSet:
        return cls(box, np.ones(box.size, dtype=bool))

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def cells(self) -> frozenset[int]:
        return frozenset(int(c) for c in self.indices)

    def is_empty(self) -> bool:
        return not self.mask.any()

    def require_nonempty(self, what: str = "cell set") -> None:
        if self.is_empty():
            raise EmptySetError(what)

    def _check(self, other: CrispCellSet) -> None:
        if self.box != other.box:
            raise GridMismatchError("cell sets live on different boxes")

    def __len__(self) -> int:
        return int(np.count_nonzero(self.mask))

    def __contains__(self, cell: int) -> bool:
        return 0 <= cell < self.box.size and bool(self.mask[cell])

    def __iter__(self):
        return iter(int(c) for c in self.indices)

    def __or__(self, other: CrispCellSet) -> CrispCellSet:
        self._check(other)
        return CrispCellSet(self.box, self.mask | other.mask)

    def __and__(self, other: CrispCellSet) -> CrispCellSet:
        self._check(other)
        return CrispCellSet(self.box, self.mask & other.mask)

    def __le__(self, other: CrispCellSet) -> bool:
        self._check(other)
        return not np.any(self.mask & ~other.mask)

    def __ge__(self, other: CrispCellSet) -> bool:
        return other <= self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CrispCellSet):
            return NotImplemented
        return self.box == other.box and np.array_equal(self.mask, other.mask)

    def __hash__(self) -> int:
        return hash((self.box, self.mask.tobytes()))

    def __repr__(self) -> str:
        shown = sorted(self.cells)
        if len(shown) > 8:
            return f"CrispCellSet({len(shown)} cells: {shown[:8]}...)"
        return f"CrispCellSet({shown})"


@dataclass(frozen=True, eq=False)
class FuzzyGrid:
    """Quantized fuzzy set: one level in 0..L per cell, membership level/L."""

    box: DomainBox
    values: np.ndarray
    levels: int = DEFAULT_LEVELS

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError(f"levels must be positive, got {self.levels}")
        values = np.array(self.values, dtype=np.int32).reshape(-1)
        if values.size != self.box.size:
            raise GridMismatchError(f"grid has {values.size} values, box has {self.box.size} cells")
        if values.size and (values.min() < 0 or values.max() > self.levels):
            raise ValueError(f"levels must lie in 0..{self.levels}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_memberships(cls, box: DomainBox, memberships, levels: int = DEFAULT_LEVELS) -> FuzzyGrid:
        """Quantize memberships in [0,1] to the nearest level."""
        m = np.clip(np.asarray(memberships, dtype=float).reshape(-1), 0.0, 1.0)
        return cls(box, np.floor(m * levels + 0.5).astype(np.int32), levels)

    @classmethod
    def full(cls, box: DomainBox, levels: int = DEFAULT_LEVELS) -> FuzzyGrid:
        """The universe: every cell at membership 1."""
        return cls(box, np.full(box.size, levels, dtype=np.int32), levels)

    @property
    def memberships(self) -> np.ndarray:
        return self.values / self.levels

    @property
    def peak(self) -> int:
        return int(self.values.max())

    def is_normal(self) -> bool:
        return self.peak == self.levels

    def require_normal(self, what: str = "fuzzy set") -> None:
        if not self.is_normal():
            raise NotNormalError(what)

    def support(self) -> CrispCellSet:
        return CrispCellSet(self.box, self.values > 0)

    def as_array(self) -> np.ndarray:
        """Levels reshaped to the box's cell layout."""
        return self.values.reshape(self.box.cells)

    def compatible_with(self, other: FuzzyGrid) -> bool:
        return self.box == other.box and self.levels == other.levels

    def __le__(self, other: FuzzyGrid) -> bool:
        """Fuzzy inclusion: cellwise membership comparison."""
        check_compatible(self, other)
        return bool(np.all(self.values <= other.values))

    def __ge__(self, other: FuzzyGrid) -> bool:
        return other <= self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FuzzyGrid):
            return NotImplemented
        return self.compatible_with(other) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.box, self.levels, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"FuzzyGrid(cells={self.box.cells}, levels={self.levels}, peak={self.peak})"


def check_compatible(*grids: FuzzyGrid) -> None:
    """Raise GridMismatchError unless all grids share box and levels."""
    first = grids[0]
    for g in grids[1:]:
        if not first.compatible_with(g):
            raise GridMismatchError()


def level_of(alpha: float | Fraction, levels: int) -> int:
    """Convert a threshold in [0,1] to its lattice level, rejecting off-lattice values."""
    if not 0 <= alpha <= 1:
        raise OffLatticeError(float(alpha), levels)
    if isinstance(alpha, Fraction):
        scaled = alpha * levels
        if scaled.denominator != 1:
            raise OffLatticeError(float(alpha), levels)
        return int(scaled)
    scaled = float(alpha) * levels
    level = round(scaled)
    if abs(scaled - level) > LATTICE_EPS * levels:
        raise OffLatticeError(float(alpha), levels)
    return int(level)


def cut_at_level(u: FuzzyGrid, level: int) -> CrispCellSet:
    """Cut at an integer level; level 0 gives the support."""
    if not 0 <= level <= u.levels:
        raise OffLatticeError(level / u.levels, u.levels)
    if level == 0:
        return CrispCellSet(u.box, u.values > 0)
    return CrispCellSet(u.box, u.values >= level)


def alpha_cut(u: FuzzyGrid, alpha: float | Fraction) -> CrispCellSet:
    """The α-cut {c : u(c) ≥ α}; for α = 0 the (closed) support.

    Raises:
        OffLatticeError: If α is not a multiple of 1/L
    """
    return cut_at_level(u, level_of(alpha, u.levels))


def cut_stack(u: FuzzyGrid) -> list[CrispCellSet]:
    """Cuts at levels 1..L, index ℓ-1 holding the level-ℓ cut."""
    return [cut_at_level(u, level) for level in range(1, u.levels + 1)]


def indicator(cells: CrispCellSet, levels: int = DEFAULT_LEVELS) -> FuzzyGrid:
    """Indicator function χ_K of a nonempty cell set."""
    cells.require_nonempty("indicator operand")
    return FuzzyGrid(cells.box, np.where(cells.mask, levels, 0).astype(np.int32), levels)


def join(*grids: FuzzyGrid) -> FuzzyGrid:
    """Fuzzy union: cellwise maximum."""
    if not grids:
        raise ValueError("join needs at least one operand")
    check_compatible(*grids)
    values = np.maximum.reduce([g.values for g in grids])
    return FuzzyGrid(grids[0].box, values, grids[0].levels)


def reconstruct_from_cuts(cuts: Sequence[CrispCellSet], levels: int | None = None) -> FuzzyGrid:
    """Rebuild a fuzzy set from its cuts at levels 1..L.

    ``cuts[ℓ-1]`` is the cut at level ℓ. The stack must be nested
    nonincreasing and the top cut nonempty.

    Raises:
        NonNestedCutsError: If some cut is not contained in the one below it
        NotNormalError: If the top cut is empty
    """
    if not cuts:
        raise ValueError("empty cut stack")
    levels = levels if levels is not None else len(cuts)
    if len(cuts) != levels:
        raise ValueError(f"expected {levels} cuts, got {len(cuts)}")
    box = cuts[0].box
    masks = np.stack([c.mask for c in cuts])
    for c in cuts:
        if c.box != box:
            raise GridMismatchError("cuts live on different boxes")
    bad = np.flatnonzero(np.any(masks[1:] & ~masks[:-1], axis=1))
    if bad.size:
        raise NonNestedCutsError(int(bad[0]) + 2)
    if not masks[-1].any():
        raise NotNormalError("reconstructed set")
    values = masks.sum(axis=0, dtype=np.int32)
    return FuzzyGrid(box, values, levels)


@dataclass(frozen=True)
class FuzzyGridProduct:
    """Lazy Cartesian product u_0 × ... × u_{m-1}: membership is the minimum of the factors."""

    factors: tuple[FuzzyGrid, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ValueError("a product needs at least one factor")
        check_compatible(*factors)
        object.__setattr__(self, "factors", factors)

    @property
    def degree(self) -> int:
        return len(self.factors)

    @property
    def levels(self) -> int:
        return self.factors[0].levels

    @property
    def box(self) -> DomainBox:
        return self.factors[0].box

    def level_at(self, cells: Sequence[int]) -> int:
        if len(cells) != self.degree:
            raise ValueError(f"expected {self.degree} cell indices, got {len(cells)}")
        return int(min(f.values[c] for f, c in zip(self.factors, cells)))

    def membership(self, cells: Sequence[int]) -> float:
        return self.level_at(cells) / self.levels

    def cut(self, alpha: float | Fraction) -> tuple[CrispCellSet, ...]:
        """Cut of the product at α, returned as the tuple of factor cuts."""
        level = level_of(alpha, self.levels)
        return tuple(cut_at_level(f, level) for f in self.factors)

    def witness(self) -> tuple[int, ...]:
        """A tuple of per-factor argmax cells; it attains the product's peak."""
        return tuple(int(np.argmax(f.values)) for f in self.factors)

    def is_normal(self) -> bool:
        return self.level_at(self.witness()) == self.levels

    def materialize(self) -> np.ndarray:
        """Full m-dimensional array of product levels (small products only)."""
        n = self.box.size**self.degree
        if n > MAX_MATERIALIZED_PRODUCT:
            raise ValueError(f"product of {n} tuples is too large to materialize")
        grids = np.ix_(*[f.values for f in self.factors])
        return np.minimum.reduce(list(np.broadcast_arrays(*grids)))

    def cut_tuples(self, level: int) -> set[tuple[int, ...]]:
        """Enumerate the tuples of the materialized product at or above ``level``."""
        arr = self.materialize()
        hits = np.argwhere(arr > 0) if level == 0 else np.argwhere(arr >= level)
        return {tuple(int(i) for i in row) for row in hits}


def cartesian_product(*factors: FuzzyGrid) -> FuzzyGridProduct:
    """Cartesian product of fuzzy sets sharing box and levels."""
    return FuzzyGridProduct(tuple(factors))


def product_cut_tuples(cuts: Sequence[CrispCellSet]) -> set[tuple[int, ...]]:
    """All tuples of a product of crisp cell sets."""
    return set(itertools.product(*[c.cells for c in cuts]))


def random_normal(
    box: DomainBox, levels: int = DEFAULT_LEVELS, rng: np.random.Generator | None = None, density: float = 0.5
) -> FuzzyGrid:
    """Random normal fuzzy set: each cell is nonzero with probability ``density``, one cell at level L."""
    rng = rng if rng is not None else np.random.default_rng()
    values = rng.integers(1, levels + 1, size=box.size) * (rng.random(box.size) < density)
    values[rng.integers(box.size)] = levels
    return FuzzyGrid(box, values.astype(np.int32), levels)
