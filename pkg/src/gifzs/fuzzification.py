"""Zadeh extension of affine maps and the generalized fuzzy Hutchinson-Barnsley operator.

Two independent evaluations of the operator are provided:

- ``gfhb_suppush`` pushes every tuple of support cells forward through each map
  and keeps the cellwise maximum of the tuple minima, then applies the grey map.
- ``gfhb_levelset`` builds the output cut by cut: the level-ℓ cut is the union
  of the crisp images of the operands' cuts at β_j(ℓ).

On the level lattice both give identical grids; their agreement is checked in
the test suite and by ``gifzs verify``.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, NonNestedCutsError
from .grey import GreySystem, check_admissible
from .grid import CrispCellSet, DomainBox, FuzzyGrid, check_compatible, cut_at_level, reconstruct_from_cuts
from .systems import AffineContraction, CrispGifs, MapStats, image_chunks, map_cellset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Gifzs:
    """Generalized iterated fuzzy function system: maps φ_j paired with grey maps ρ_j.

    Construction validates the pairing and the admissibility of the grey maps.
    ``permissive`` tolerates grey maps that are identically zero.

    Raises:
        InadmissibleError: If the grey system violates an admissibility clause
        NotContractiveError: If a map is not a contraction (raised by CrispGifs)
    """

    gifs: CrispGifs
    greys: GreySystem
    permissive: bool = False

    def __post_init__(self):
        if len(self.gifs.maps) != len(self.greys):
            raise ValueError(f"{len(self.gifs.maps)} maps but {len(self.greys)} grey maps")
        check_admissible(self.greys, permissive=self.permissive).raise_if_failed()

    @property
    def box(self) -> DomainBox:
        return self.gifs.box

    @property
    def degree(self) -> int:
        return self.gifs.degree

    @property
    def levels(self) -> int:
        return self.greys.levels

    @property
    def lipschitz(self) -> float:
        """λ = max_j Lip(φ_j)."""
        return self.gifs.lipschitz

    def __len__(self) -> int:
        return len(self.gifs.maps)

    def top_subsystem(self) -> CrispGifs:
        """The crisp system 𝒮′ of maps whose grey map reaches 1."""
        top = self.greys.top_indices()
        if not top:
            raise ValueError("no grey map reaches 1")
        return self.gifs.subsystem(top)


def _check_operands(levels: int, box: DomainBox, operands: tuple[FuzzyGrid, ...], degree: int) -> None:
    if len(operands) != degree:
        raise ValueError(f"system of degree {degree} applied to {len(operands)} operands")
    check_compatible(*operands)
    if operands[0].box != box:
        raise GridMismatchError("operands live on a different box than the system")
    if operands[0].levels != levels:
        raise GridMismatchError(f"operands use {operands[0].levels} levels, system uses {levels}")
    for i, u in enumerate(operands):
        u.require_normal(f"operand {i}")


def zadeh_extend(f: AffineContraction, *operands: FuzzyGrid, stats: MapStats | None = None) -> FuzzyGrid:
    """f(u_0 × ... × u_{m-1}) by Zadeh's extension principle.

    Each output cell gets the maximum, over the tuples of support cells mapped
    into it, of the tuple's minimum membership; cells with no preimage get 0.
    """
    check_compatible(*operands)
    first = operands[0]
    supports = [np.flatnonzero(u.values) for u in operands]
    weights = [u.values[idx] for u, idx in zip(operands, supports)]
    out = np.zeros(first.box.size, dtype=np.int32)
    for cells, w in image_chunks(f, first.box, supports, weights, stats=stats):
        np.maximum.at(out, cells, w)
    return FuzzyGrid(first.box, out, first.levels)


def gfhb_suppush(system: Gifzs, *operands: FuzzyGrid, stats: MapStats | None = None) -> FuzzyGrid:
    """𝒵(u_0, ..., u_{m-1}) = ⋁_j ρ_j(φ_j(u_0 × ... × u_{m-1})), by forward push."""
    _check_operands(system.levels, system.box, operands, system.degree)
    out = np.zeros(system.box.size, dtype=np.int32)
    for f, rho in zip(system.gifs.maps, system.greys):
        if rho.is_zero():
            continue
        image = zadeh_extend(f, *operands, stats=stats)
        np.maximum(out, rho.samples[image.values], out=out)
    return FuzzyGrid(system.box, out, system.levels)


def gfhb_levelset(system: Gifzs, *operands: FuzzyGrid, stats: MapStats | None = None) -> FuzzyGrid:
    """𝒵(u_0, ..., u_{m-1}) assembled from its cuts.

    The level-ℓ cut is ∪_j φ_j([u_0]^{β_j(ℓ)} × ... × [u_{m-1}]^{β_j(ℓ)}) over the
    maps with ρ_j(1) ≥ ℓ. Crisp images are shared between levels with equal β.

    Raises:
        NonNestedCutsError: If the produced cuts are not nested (a β inconsistency)
    """
    _check_operands(system.levels, system.box, operands, system.degree)
    started = time.perf_counter()
    levels = system.levels
    tables = [rho.beta_table() for rho in system.greys]
    operand_cuts: dict[int, list[CrispCellSet]] = {}
    images: dict[tuple[int, int], CrispCellSet] = {}

    def cuts_at(level: int) -> list[CrispCellSet]:
        if level not in operand_cuts:
            operand_cuts[level] = [cut_at_level(u, level) for u in operands]
        return operand_cuts[level]

    stack = []
    for level in range(1, levels + 1):
        mask = np.zeros(system.box.size, dtype=bool)
        for j, f in enumerate(system.gifs.maps):
            b = int(tables[j][level])
            if b < 0:
                continue
            key = (j, b)
            if key not in images:
                images[key] = map_cellset(f, *cuts_at(b), stats=stats)
            mask |= images[key].mask
        stack.append(CrispCellSet(system.box, mask))
    logger.debug(
        "level-set operator: %d levels, %d distinct crisp images in %.3fs",
        levels,
        len(images),
        time.perf_counter() - started,
    )
    try:
        return reconstruct_from_cuts(stack, levels)
    except NonNestedCutsError:
        logger.error("level-set operator produced non-nested cuts")
        raise


OPERATORS: dict[str, Callable[..., FuzzyGrid]] = {
    "suppush": gfhb_suppush,
    "levelset": gfhb_levelset,
}


def get_operator(name: str) -> Callable[..., FuzzyGrid]:
    """Look up an operator implementation by name."""
    try:
        return OPERATORS[name]
    except KeyError:
        raise ValueError(f"unknown operator {name!r}; expected one of {', '.join(OPERATORS)}")


def lift_degree(system: Gifzs) -> Gifzs:
    """Degree m+1 system whose maps ignore the new last argument; grey maps unchanged."""
    return Gifzs(system.gifs.lifted(), system.greys, system.permissive)
