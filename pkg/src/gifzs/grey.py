"""Grey level maps: nondecreasing right-continuous maps [0,1] -> [0,1] on the level lattice.

A map is stored as its L+1 samples ρ(ℓ/L), each itself a level. Between lattice
points the map is the right-continuous step through the samples, so the
generalized inverse β and the threshold r₊ are exact lattice lookups.

Text specs accepted by :func:`parse_grey_spec`:

- ``id``                 t -> t
- ``scale:s``            t -> s·t (s may be a fraction such as ``1/2``)
- ``step:a``             a·χ_[a,1]
- ``zero-below:c``       0 for t < c, t for t >= c
- ``staircase:k``        t -> floor(k·t)/k
- ``zero``               t -> 0 (inadmissible; only usable in permissive systems)
- ``[[t0, v0], ...]``    right-continuous steps: v_i on [t_i, t_{i+1}), 0 below t_0
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import GreyMapError, GridMismatchError, InadmissibleError
from .grid import LATTICE_EPS, FuzzyGrid, level_of

logger = logging.getLogger(__name__)

GreySpec = str | list


@dataclass(frozen=True, eq=False)
class GreyLevelMap:
    """Quantized ndrc grey level map."""

    samples: np.ndarray
    spec: GreySpec | None = field(default=None, compare=False)

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.int32).reshape(-1)
        if samples.size < 2:
            raise GreyMapError("needs at least two samples")
        levels = samples.size - 1
        if samples.min() < 0 or samples.max() > levels:
            raise GreyMapError(f"samples must lie in 0..{levels}")
        if np.any(np.diff(samples) < 0):
            raise GreyMapError("clause a: samples must be nondecreasing")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @property
    def levels(self) -> int:
        return self.samples.size - 1

    @property
    def at_zero(self) -> int:
        return int(self.samples[0])

    @property
    def at_one(self) -> int:
        return int(self.samples[-1])

    def is_zero(self) -> bool:
        return self.at_one == 0

    def __call__(self, level: int) -> int:
        return int(self.samples[level])

    def beta(self, level: int) -> int | None:
        """Generalized inverse min{ℓ : ρ(ℓ) ≥ level} for level in (0, ρ(1)].

        Returns None (the empty-cut sentinel) when level exceeds ρ(1).
        """
        if level > self.at_one:
            return None
        return int(np.searchsorted(self.samples, level, side="left"))

    def beta_table(self) -> np.ndarray:
        """β for every level 0..L, with -1 marking the empty cut."""
        targets = np.arange(self.levels + 1)
        table = np.searchsorted(self.samples, targets, side="left").astype(np.int64)
        table[targets > self.at_one] = -1
        return table

    def r_plus(self) -> int:
        """First lattice level where ρ is positive (L+1 for the zero map)."""
        positive = np.flatnonzero(self.samples > 0)
        return int(positive[0]) if positive.size else self.levels + 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GreyLevelMap):
            return NotImplemented
        return np.array_equal(self.samples, other.samples)

    def __hash__(self) -> int:
        return hash(self.samples.tobytes())

    def __repr__(self) -> str:
        return f"GreyLevelMap({format_grey_spec(self)!r}, levels={self.levels})"


EMPTY_CUT = None


def beta(rho: GreyLevelMap, alpha: float | Fraction) -> float | None:
    """β(α) as a membership value, or EMPTY_CUT when α > ρ(1)."""
    level = rho.beta(level_of(alpha, rho.levels))
    return EMPTY_CUT if level is None else level / rho.levels


def r_plus(rho: GreyLevelMap) -> float:
    """r₊ = inf{t : ρ(t) > 0}; attained on the lattice."""
    return min(rho.r_plus(), rho.levels) / rho.levels


def apply_grey(rho: GreyLevelMap, u: FuzzyGrid) -> FuzzyGrid:
    """Cellwise composition ρ(u)."""
    if rho.levels != u.levels:
        raise GridMismatchError(f"grey map has {rho.levels} levels, grid has {u.levels}")
    return FuzzyGrid(u.box, rho.samples[u.values], u.levels)


# ==================== Construction from specs ====================


def _fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise GreyMapError(f"{what}: cannot read number {text!r}")


def _round_level(value: Fraction, levels: int) -> int:
    """Nearest lattice level, ties up."""
    return min(levels, max(0, math.floor(value * levels + Fraction(1, 2))))


def identity(levels: int) -> GreyLevelMap:
    return GreyLevelMap(np.arange(levels + 1), spec="id")


def scale(s: Fraction | float, levels: int) -> GreyLevelMap:
    s = Fraction(s).limit_denominator(1 << 20)
    if s < 0:
        raise GreyMapError("scale factor must be nonnegative")
    samples = [_round_level(s * Fraction(ell, levels), levels) for ell in range(levels + 1)]
    return GreyLevelMap(samples, spec=f"scale:{_format_number(s)}")


def step(a: Fraction | float, levels: int) -> GreyLevelMap:
    k = level_of(a, levels)
    samples = np.where(np.arange(levels + 1) >= k, k, 0)
    return GreyLevelMap(samples, spec=f"step:{_format_number(Fraction(k, levels))}")


def zero_below(c: Fraction | float, levels: int) -> GreyLevelMap:
    k = max(0, math.ceil(float(c) * levels - LATTICE_EPS))
    ell = np.arange(levels + 1)
    return GreyLevelMap(np.where(ell >= k, ell, 0), spec=f"zero-below:{_format_number(Fraction(c).limit_denominator(1 << 20))}")


def staircase(k: int, levels: int) -> GreyLevelMap:
    if k < 1:
        raise GreyMapError("staircase needs at least one step")
    samples = [(2 * ((k * ell) // levels) * levels + k) // (2 * k) for ell in range(levels + 1)]
    return GreyLevelMap(samples, spec=f"staircase:{k}")


def zero(levels: int) -> GreyLevelMap:
    return GreyLevelMap(np.zeros(levels + 1), spec="zero")


def from_breakpoints(points: Sequence[Sequence[float]], levels: int) -> GreyLevelMap:
    """Right-continuous step map through (t, v) breakpoints."""
    samples = np.zeros(levels + 1, dtype=np.int32)
    prev_t = -math.inf
    for pair in points:
        if len(pair) != 2:
            raise GreyMapError(f"breakpoint {pair!r} is not a (t, v) pair")
        t, v = float(pair[0]), float(pair[1])
        if not (0.0 <= t <= 1.0 and 0.0 <= v <= 1.0):
            raise GreyMapError(f"breakpoint {pair!r} outside [0,1]^2")
        if t < prev_t:
            raise GreyMapError("clause a: breakpoints must be sorted by t")
        prev_t = t
        start = max(0, math.ceil(t * levels - LATTICE_EPS))
        samples[start:] = _round_level(Fraction(v).limit_denominator(1 << 20), levels)
    return GreyLevelMap(samples, spec=[[float(t), float(v)] for t, v in points])


def parse_grey_spec(spec: GreySpec, levels: int) -> GreyLevelMap:
    """Build a grey map from a token or a breakpoint list.

    Raises:
        GreyMapError: If the spec is unknown or describes a non-monotone map
    """
    if isinstance(spec, (list, tuple)):
        return from_breakpoints(spec, levels)
    if not isinstance(spec, str):
        raise GreyMapError(f"unsupported grey spec {spec!r}")
    token = spec.strip()
    name, _, arg = token.partition(":")
    if name == "id" and not arg:
        return identity(levels)
    if name == "zero" and not arg:
        return zero(levels)
    if name == "scale":
        return scale(_fraction(arg, token), levels)
    if name == "step":
        return step(_fraction(arg, token), levels)
    if name == "zero-below":
        return zero_below(_fraction(arg, token), levels)
    if name == "staircase":
        try:
            return staircase(int(arg), levels)
        except ValueError:
            raise GreyMapError(f"{token}: step count must be an integer")
    raise GreyMapError(f"unknown grey spec {token!r}")


def _format_number(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return repr(float(x)) if x.denominator > 1000 else f"{x.numerator}/{x.denominator}"


def format_grey_spec(rho: GreyLevelMap) -> GreySpec:
    """Spec text for serialization; explicit breakpoints when no token is known."""
    if rho.spec is not None:
        return rho.spec
    points = []
    last = None
    for ell, v in enumerate(rho.samples):
        if v != last:
            points.append([ell / rho.levels, int(v) / rho.levels])
            last = v
    return points


# ==================== Systems of grey maps ====================


@dataclass(frozen=True)
class GreySystem:
    """The grey maps (ρ_j) paired with the maps of a system."""

    maps: tuple[GreyLevelMap, ...]

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("a grey system needs at least one map")
        if len({m.levels for m in maps}) != 1:
            raise GridMismatchError("grey maps use different level counts")
        object.__setattr__(self, "maps", maps)

    @property
    def levels(self) -> int:
        return self.maps[0].levels

    def __len__(self) -> int:
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)

    def __getitem__(self, j: int) -> GreyLevelMap:
        return self.maps[j]

    def top_indices(self) -> tuple[int, ...]:
        """Indices j with ρ_j(1) = 1."""
        return tuple(j for j, rho in enumerate(self.maps) if rho.at_one == rho.levels)


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the admissibility check; ``clause`` names the first violation."""

    admissible: bool
    clause: str | None = None
    index: int | None = None
    detail: str = ""

    def raise_if_failed(self) -> None:
        if not self.admissible:
            raise InadmissibleError(self.clause or "?", self.detail, self.index)


def check_admissible(system: GreySystem, permissive: bool = False) -> AdmissibilityReport:
    """Check clauses a (nondecreasing), nonzero, c (ρ_j(0)=0) and d (some ρ_j(1)=1).

    Clause b (right continuity) holds by construction. With ``permissive`` the
    zero map is tolerated, reproducing computations that use ρ ≡ 0.
    """
    for j, rho in enumerate(system.maps):
        if np.any(np.diff(rho.samples) < 0):
            return AdmissibilityReport(False, "a", j, f"grey {j} is not nondecreasing")
        if rho.is_zero() and not permissive:
            return AdmissibilityReport(False, "nonzero", j, f"grey {j} is identically zero")
        if rho.at_zero != 0:
            return AdmissibilityReport(
                False, "c", j, f"grey {j}: ρ(0) = {rho.at_zero / rho.levels:.4g}, must be 0"
            )
    if not system.top_indices():
        return AdmissibilityReport(False, "d", None, "no grey map reaches ρ(1) = 1")
    return AdmissibilityReport(True)


@dataclass(frozen=True)
class ProperMapReport:
    index: int
    r_plus: int
    beta_top: int | None
    r_plus_ok: bool
    beta_top_ok: bool

    @property
    def proper(self) -> bool:
        return self.r_plus_ok and self.beta_top_ok


@dataclass(frozen=True)
class ProperReport:
    """Per-map properness; lattice reading of r₊ = 0 and β(ρ(1)) = 1 is within one level."""

    proper: bool
    maps: tuple[ProperMapReport, ...]


def check_proper(system: GreySystem) -> ProperReport:
    """Check r₊ ≤ 1/L and β(ρ(1)) ≥ 1 − 1/L for every map.

    Both clauses of a proper family, r₊ = 0 and β(ρ(1)) = 1, are read with one
    level of slack. The quantized identity has r₊ = 1/L, and with ties rounded
    up ``scale:1/2`` at even L is flat on its top step (ρ(1 − 1/L) = ρ(1)), so
    its β(ρ(1)) is 1 − 1/L.
    """
    reports = []
    for j, rho in enumerate(system.maps):
        rp = rho.r_plus()
        top = rho.beta(rho.at_one) if rho.at_one > 0 else None
        reports.append(
            ProperMapReport(
                index=j,
                r_plus=rp,
                beta_top=top,
                r_plus_ok=rp <= 1,
                beta_top_ok=top is not None and top >= rho.levels - 1,
            )
        )
    admissible = check_admissible(system).admissible
    return ProperReport(admissible and all(r.proper for r in reports), tuple(reports))
