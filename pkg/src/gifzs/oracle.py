"""Brute-force reference implementations for tiny instances.

Everything here is plain Python over lists: no numpy arithmetic, no pruning,
no code shared with the vectorized operators. Floating-point operations are
performed in the same order as the main path, so results must agree exactly.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

from .fuzzification import Gifzs
from .grid import LATTICE_EPS, DomainBox, FuzzyGrid
from .systems import AffineContraction

logger = logging.getLogger(__name__)

# Bounds of an instance the oracle is meant for
TINY_MAX_CELLS = 16
TINY_MAX_LEVELS = 16
TINY_MAX_DEGREE = 2
TINY_MAX_MAPS = 3

# Iteration cap for oracle_attractor when none is given
ORACLE_MAX_ITER = 10_000


def is_tiny(system: Gifzs) -> bool:
    """Whether a system is small enough for exhaustive enumeration."""
    return (
        system.box.size <= TINY_MAX_CELLS
        and system.levels <= TINY_MAX_LEVELS
        and system.degree <= TINY_MAX_DEGREE
        and len(system) <= TINY_MAX_MAPS
    )


class _Geometry:
    """Cell centers, snapping and distances recomputed from the box parameters."""

    def __init__(self, box: DomainBox):
        self.lo = [float(x) for x in box.lo]
        self.cells = list(box.cells)
        self.wrap = box.wrap
        self.widths = [(b - a) / n for a, b, n in zip(box.lo, box.hi, box.cells)]
        self.ratio_sq = []
        for w in self.widths:
            r = w / self.widths[0]
            self.ratio_sq.append(r * r)
        self.multi = list(itertools.product(*[range(n) for n in self.cells]))
        self.centers = [[lo + (i + 0.5) * w for lo, i, w in zip(self.lo, idx, self.widths)] for idx in self.multi]

    def snap(self, point: list[float], wrap: bool) -> int:
        flat = 0
        for k, n in enumerate(self.cells):
            t = (point[k] - self.lo[k]) / self.widths[k]
            if wrap:
                t = t % n
            idx = math.ceil(t - 1.0 - LATTICE_EPS)
            idx = idx % n if wrap else min(max(idx, 0), n - 1)
            flat = flat * n + idx
        return flat

    def distance(self, a: int, b: int) -> float:
        acc = 0.0
        for k, n in enumerate(self.cells):
            diff = abs(self.multi[a][k] - self.multi[b][k])
            if self.wrap:
                diff = min(diff, n - diff)
            acc = acc + (diff * diff) * self.ratio_sq[k]
        return math.sqrt(acc) * self.widths[0]

    def center_cell(self) -> int:
        flat = 0
        for n in self.cells:
            flat = flat * n + n // 2
        return flat


def _image_point(f: AffineContraction, centers: list[list[float]]) -> list[float]:
    dim = f.dim
    parts = []
    for i, x in enumerate(centers):
        a = f.blocks[i]
        part = []
        for k in range(dim):
            acc = float(a[k, 0]) * x[0]
            for col in range(1, dim):
                acc = acc + float(a[k, col]) * x[col]
            part.append(acc)
        parts.append(part)
    point = []
    for k in range(dim):
        s = parts[0][k]
        for i in range(1, len(parts)):
            s = s + parts[i][k]
        point.append(s + float(f.offset[k]))
    return point


def _zadeh_values(f: AffineContraction, geometry: _Geometry, values: list[list[int]], wrap: bool) -> list[int]:
    size = len(geometry.centers)
    images = {}
    for t in itertools.product(range(size), repeat=len(values)):
        images[t] = geometry.snap(_image_point(f, [geometry.centers[c] for c in t]), wrap)
    out = []
    for z in range(size):
        best = 0
        for t, cell in images.items():
            if cell == z:
                best = max(best, min(values[i][c] for i, c in enumerate(t)))
        out.append(best)
    return out


def oracle_zadeh(f: AffineContraction, *operands: FuzzyGrid) -> FuzzyGrid:
    """sup over all preimage tuples of the tuple minimum, by full enumeration."""
    box = operands[0].box
    geometry = _Geometry(box)
    values = [[int(v) for v in u.values] for u in operands]
    out = _zadeh_values(f, geometry, values, f.wrap or box.wrap)
    return FuzzyGrid(box, out, operands[0].levels)


def _hausdorff(geometry: _Geometry, a: list[int], b: list[int]) -> float:
    forward = max(min(geometry.distance(x, y) for y in b) for x in a)
    backward = max(min(geometry.distance(y, x) for x in a) for y in b)
    return max(forward, backward)


def oracle_cut_distances(u: FuzzyGrid, v: FuzzyGrid) -> list[float]:
    """Hausdorff distance between the cuts of u and v at every level 0..L.

    Level 0 uses the supports.
    """
    geometry = _Geometry(u.box)
    uv = [int(x) for x in u.values]
    vv = [int(x) for x in v.values]
    out = []
    for level in range(u.levels + 1):
        threshold = max(level, 1)
        a = [c for c, x in enumerate(uv) if x >= threshold]
        b = [c for c, x in enumerate(vv) if x >= threshold]
        out.append(_hausdorff(geometry, a, b))
    return out


def oracle_dinfty(u: FuzzyGrid, v: FuzzyGrid) -> float:
    """sup over all levels, α = 0 included, of the cut Hausdorff distances."""
    return max(oracle_cut_distances(u, v))


@dataclass
class OracleRun:
    attractor: FuzzyGrid
    iterations: int
    converged: bool
    cycle_length: int | None = None


def oracle_attractor(
    system: Gifzs, seeds: list[FuzzyGrid] | None = None, max_iter: int = ORACLE_MAX_ITER
) -> OracleRun:
    """Iterate the fuzzy operator with oracle_zadeh until the m-window is stationary.

    The recurrence feeds the newest iterate first. A repeated window without a
    fixed point is reported as a cycle.
    """
    box = system.box
    geometry = _Geometry(box)
    levels = system.levels
    m = system.degree
    if seeds is None:
        seed = [0] * box.size
        seed[geometry.center_cell()] = levels
        window = [tuple(seed)] * m
    else:
        window = [tuple(int(x) for x in u.values) for u in seeds]
    greys = [[int(x) for x in rho.samples] for rho in system.greys]
    seen = {tuple(window): 0}
    new = window[-1]
    for k in range(1, max_iter + 1):
        args = [list(w) for w in reversed(window)]
        out = [0] * box.size
        for f, samples in zip(system.gifs.maps, greys):
            image = _zadeh_values(f, geometry, args, f.wrap or box.wrap)
            out = [max(o, samples[x]) for o, x in zip(out, image)]
        new = tuple(out)
        if all(new == w for w in window):
            return OracleRun(FuzzyGrid(box, list(new), levels), k, True)
        window = window[1:] + [new]
        key = tuple(window)
        if key in seen:
            cycle = k - seen[key]
            logger.warning("oracle: lattice cycle of length %d after %d iterations", cycle, k)
            return OracleRun(FuzzyGrid(box, list(new), levels), k, False, cycle)
        seen[key] = k
    return OracleRun(FuzzyGrid(box, list(new), levels), max_iter, False)
