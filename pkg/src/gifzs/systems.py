"""Affine contractions on X^m, crisp GIFS and the generalized Hutchinson-Barnsley operator."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GridMismatchError, NotContractiveError
from .grid import LATTICE_EPS, CrispCellSet, DomainBox
from .metrics import hausdorff

logger = logging.getLogger(__name__)

# Number of tuples evaluated per vectorized chunk
TUPLE_CHUNK = 1 << 20


@dataclass(frozen=True, eq=False)
class AffineContraction:
    """Affine map φ(x_0, ..., x_{m-1}) = Σ_i A_i x_i + b from X^m to X."""

    blocks: tuple[np.ndarray, ...]
    offset: np.ndarray
    wrap: bool = False

    def __post_init__(self):
        blocks = tuple(np.array(a, dtype=float, ndmin=2) for a in self.blocks)
        if not blocks:
            raise ValueError("an affine map needs at least one block")
        offset = np.array(self.offset, dtype=float).reshape(-1)
        d = offset.size
        for i, a in enumerate(blocks):
            if a.shape != (d, d):
                raise ValueError(f"block {i} has shape {a.shape}, expected {(d, d)}")
            a.flags.writeable = False
        offset.flags.writeable = False
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "offset", offset)

    @classmethod
    def from_flat(
        cls, degree: int, dim: int, blocks: Sequence[float], offset: Sequence[float], wrap: bool = False
    ) -> AffineContraction:
        """Build from m·d·d row-major block entries, block 0 first."""
        flat = np.asarray(blocks, dtype=float).reshape(-1)
        if flat.size != degree * dim * dim:
            raise ValueError(f"expected {degree * dim * dim} block entries, got {flat.size}")
        parts = tuple(flat[i * dim * dim : (i + 1) * dim * dim].reshape(dim, dim) for i in range(degree))
        return cls(parts, np.asarray(offset, dtype=float), wrap)

    @property
    def degree(self) -> int:
        return len(self.blocks)

    @property
    def dim(self) -> int:
        return self.offset.size

    @cached_property
    def lipschitz(self) -> float:
        """Σ_i ‖A_i‖₂, a Lipschitz bound with respect to the max metric on X^m."""
        return float(sum(np.linalg.norm(a, 2) for a in self.blocks))

    def flat_blocks(self) -> list[float]:
        return [float(x) for a in self.blocks for x in a.reshape(-1)]

    def lifted(self) -> AffineContraction:
        """Same map on X^{m+1}, ignoring the new last coordinate."""
        zero = np.zeros((self.dim, self.dim))
        return AffineContraction(self.blocks + (zero,), self.offset, self.wrap)

    def contribution(self, i: int, points: np.ndarray) -> np.ndarray:
        """A_i x for each row x of ``points``.

        Evaluated entry by entry in a fixed order so results are reproducible
        bit for bit by scalar code.
        """
        a = self.blocks[i]
        out = np.empty((len(points), self.dim))
        for k in range(self.dim):
            acc = a[k, 0] * points[:, 0]
            for col in range(1, self.dim):
                acc = acc + a[k, col] * points[:, col]
            out[:, k] = acc
        return out

    def __call__(self, *points: np.ndarray) -> np.ndarray:
        """Evaluate on m arrays of points of equal length."""
        if len(points) != self.degree:
            raise ValueError(f"expected {self.degree} arguments, got {len(points)}")
        total = self.contribution(0, np.asarray(points[0], dtype=float).reshape(-1, self.dim))
        for i in range(1, self.degree):
            total = total + self.contribution(i, np.asarray(points[i], dtype=float).reshape(-1, self.dim))
        return total + self.offset

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffineContraction):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.wrap == other.wrap
            and np.array_equal(self.offset, other.offset)
            and all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))
        )

    def __hash__(self) -> int:
        return hash((self.offset.tobytes(), tuple(a.tobytes() for a in self.blocks), self.wrap))


def lip_bound(f: AffineContraction) -> float:
    """Lipschitz bound λ with d(f(x), f(y)) ≤ λ·d^m(x, y)."""
    return f.lipschitz


@dataclass
class MapStats:
    """Counters collected while pushing cells through maps."""

    clamped: int = 0
    tuples: int = 0

    def merge(self, other: MapStats) -> None:
        self.clamped += other.clamped
        self.tuples += other.tuples


def image_chunks(
    f: AffineContraction,
    box: DomainBox,
    index_lists: Sequence[np.ndarray],
    weights: Sequence[np.ndarray] | None = None,
    stats: MapStats | None = None,
) -> Iterator[tuple[np.ndarray, np.ndarray | None]]:
    """Image cells of every tuple of the product of ``index_lists``.

    With ``weights`` (one array per factor) each tuple also carries the minimum
    of its factors' weights. Yields (image cells, tuple weights or None) in
    chunks of at most TUPLE_CHUNK tuples.
    """
    if len(index_lists) != f.degree:
        raise ValueError(f"map of degree {f.degree} applied to {len(index_lists)} operands")
    if any(len(idx) == 0 for idx in index_lists):
        return
    parts = [f.contribution(i, box.centers[idx]) for i, idx in enumerate(index_lists)]
    ws = [np.asarray(w) for w in weights] if weights is not None else None

    prefix = parts[0]
    prefix_w = ws[0] if ws is not None else None
    for i in range(1, f.degree - 1):
        prefix = (prefix[:, None, :] + parts[i][None, :, :]).reshape(-1, f.dim)
        if ws is not None:
            prefix_w = np.minimum(prefix_w[:, None], ws[i][None, :]).reshape(-1)

    if f.degree == 1:
        last, last_w = None, None
        rows = max(1, TUPLE_CHUNK)
    else:
        last = parts[-1]
        last_w = ws[-1] if ws is not None else None
        rows = max(1, TUPLE_CHUNK // len(last))

    for start in range(0, len(prefix), rows):
        block = prefix[start : start + rows]
        if last is None:
            pts = block + f.offset
            w = prefix_w[start : start + rows] if ws is not None else None
        else:
            pts = (block[:, None, :] + last[None, :, :]).reshape(-1, f.dim) + f.offset
            w = None
            if ws is not None:
                w = np.minimum(prefix_w[start : start + rows, None], last_w[None, :]).reshape(-1)
        cells, outside = box.nearest_cells(pts, wrap=f.wrap or box.wrap)
        if stats is not None:
            stats.clamped += outside
            stats.tuples += len(cells)
        yield cells, w


def map_cellset(f: AffineContraction, *operands: CrispCellSet, stats: MapStats | None = None) -> CrispCellSet:
    """φ(C_0 × ... × C_{m-1}) snapped to the grid."""
    box = operands[0].box
    for c in operands:
        if c.box != box:
            raise GridMismatchError("operands live on different boxes")
        c.require_nonempty("map operand")
    mask = np.zeros(box.size, dtype=bool)
    for cells, _ in image_chunks(f, box, [c.indices for c in operands], stats=stats):
        mask[cells] = True
    return CrispCellSet(box, mask)


@dataclass(frozen=True)
class CrispGifs:
    """Crisp generalized IFS: n contractive affine maps X^m -> X on a box."""

    box: DomainBox
    maps: tuple[AffineContraction, ...]

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("a system needs at least one map")
        degree = maps[0].degree
        for j, f in enumerate(maps):
            if f.degree != degree:
                raise ValueError(f"map {j} has degree {f.degree}, expected {degree}")
            if f.dim != self.box.dim:
                raise ValueError(f"map {j} acts on R^{f.dim}, box is {self.box.dim}-dimensional")
            if f.lipschitz >= 1:
                raise NotContractiveError(j, f.lipschitz)
        object.__setattr__(self, "maps", maps)

    @property
    def degree(self) -> int:
        return self.maps[0].degree

    @property
    def lipschitz(self) -> float:
        return max(f.lipschitz for f in self.maps)

    def subsystem(self, indices: Sequence[int]) -> CrispGifs:
        return CrispGifs(self.box, tuple(self.maps[j] for j in indices))

    def lifted(self) -> CrispGifs:
        return CrispGifs(self.box, tuple(f.lifted() for f in self.maps))


def ghb_apply(system: CrispGifs, *operands: CrispCellSet, stats: MapStats | None = None) -> CrispCellSet:
    """𝒮(K_0, ..., K_{m-1}) = ∪_j φ_j(K_0 × ... × K_{m-1})."""
    if len(operands) != system.degree:
        raise ValueError(f"system of degree {system.degree} applied to {len(operands)} operands")
    result = None
    for f in system.maps:
        image = map_cellset(f, *operands, stats=stats)
        result = image if result is None else result | image
    return result


def default_max_iter(lipschitz: float, box: DomainBox, degree: int, levels: int = 1) -> int:
    """Iteration cap for the recurrence.

    The contraction count that shrinks the box diagonal below one cell, plus the
    degree, is the smallest cap that reaches the tolerance. The cap returned is
    padded well above it (at least 64 steps, four times the count, plus the bits
    of L) because lattice runs often need extra steps to settle on an exact
    fixed point or reveal a cycle.
    """
    span = math.dist(box.lo, box.hi)
    if lipschitz <= 0:
        steps = 1
    else:
        steps = math.ceil(math.log(max(span / box.diagonal, 1.0)) / math.log(1 / lipschitz))
    return max(64, 4 * (steps + degree) + levels.bit_length())


@dataclass
class RecurrenceResult:
    """Outcome of an m-step recurrence run."""

    final: object
    iterations: int
    decay: list[float] = field(default_factory=list)
    converged: bool = False
    exact: bool = False
    cycle_length: int | None = None


def iterate_recurrence(
    step: Callable[..., object],
    seeds: Sequence[object],
    distance: Callable[[object, object], float],
    max_iter: int,
    tol: float = 0.0,
    on_step: Callable[[int, object, list], None] | None = None,
) -> RecurrenceResult:
    """Run x_{k+m} = step(x_{k+m-1}, ..., x_k) with newest-first arguments.

    ``decay[k-1]`` is the distance between the windows before and after step k,
    the largest of the last m single-step changes. Stops on an exact fixed
    point (the new value equals the whole window), on decay ≤ tol when tol > 0,
    or on a repeated window (a lattice cycle).
    """
    window = list(seeds)
    m = len(window)
    changes: list[float] = []
    seen: dict[int, list[tuple[int, tuple]]] = {hash(tuple(window)): [(0, tuple(window))]}
    result = RecurrenceResult(final=window[-1], iterations=0)
    for k in range(1, max_iter + 1):
        new = step(*reversed(window))
        changes.append(distance(new, window[-1]))
        change = max(changes[-m:])
        result.decay.append(change)
        result.iterations = k
        result.final = new
        if on_step is not None:
            on_step(k, new, window)
        logger.debug("iteration %d: change %.6g", k, change)
        if all(new == w for w in window):
            result.converged = True
            result.exact = True
            return result
        if tol > 0 and change <= tol * (1 + LATTICE_EPS):
            result.converged = True
            return result
        window = window[1:] + [new]
        snapshot = tuple(window)
        bucket = seen.setdefault(hash(snapshot), [])
        for earlier, old in bucket:
            if all(a == b for a, b in zip(old, snapshot)):
                result.cycle_length = k - earlier
                logger.warning("lattice cycle of length %d detected after %d iterations", result.cycle_length, k)
                return result
        bucket.append((k, snapshot))
    logger.warning("no convergence after %d iterations", max_iter)
    return result


@dataclass
class CrispRun:
    """Crisp attractor plus iteration diagnostics."""

    attractor: CrispCellSet
    iterations: int
    decay: list[float]
    converged: bool
    exact: bool
    cycle_length: int | None = None
    clamped: int = 0


def crisp_attractor(
    system: CrispGifs,
    seeds: Sequence[CrispCellSet] | None = None,
    max_iter: int | None = None,
    tol: float = 0.0,
) -> CrispRun:
    """Iterate K_{k+m} = 𝒮(K_{k+m-1}, ..., K_k) to the attractor A_𝒮.

    Default seeds are m copies of the middle cell. An unconverged run is
    returned with ``converged=False``.
    """
    box = system.box
    if seeds is None:
        seeds = [CrispCellSet.from_cells(box, [box.center_cell()])] * system.degree
    if len(seeds) != system.degree:
        raise ValueError(f"expected {system.degree} seeds, got {len(seeds)}")
    if max_iter is None:
        max_iter = default_max_iter(system.lipschitz, box, system.degree)
    stats = MapStats()
    run = iterate_recurrence(
        lambda *ks: ghb_apply(system, *ks, stats=stats),
        seeds,
        lambda a, b: hausdorff(a, b).value,
        max_iter,
        tol,
    )
    if stats.clamped:
        logger.warning("%d image points fell outside the box and were clamped", stats.clamped)
    return CrispRun(
        attractor=run.final,
        iterations=run.iterations,
        decay=run.decay,
        converged=run.converged,
        exact=run.exact,
        cycle_length=run.cycle_length,
        clamped=stats.clamped,
    )
