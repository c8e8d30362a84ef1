"""Fuzzy fractal attractors of generalized iterated fuzzy function systems.

Fuzzy sets are discretized on uniform grids with L grey levels; systems of
affine contractions paired with grey-level maps are iterated to their fuzzy
attractor. A command line and an MCP tool server sit on top.
"""

from .attractor import approximate_gifzs, approximate_ifzs, collage, compare_cuts, iterate_attractor
from .fuzzification import Gifzs, gfhb_levelset, gfhb_suppush, zadeh_extend
from .grid import CrispCellSet, DomainBox, FuzzyGrid
from .metrics import d_infty, hausdorff
from .systems import AffineContraction, CrispGifs, crisp_attractor

__version__ = "0.1.0"

__all__ = [
    "AffineContraction",
    "CrispCellSet",
    "CrispGifs",
    "DomainBox",
    "FuzzyGrid",
    "Gifzs",
    "approximate_gifzs",
    "approximate_ifzs",
    "collage",
    "compare_cuts",
    "crisp_attractor",
    "d_infty",
    "gfhb_levelset",
    "gfhb_suppush",
    "hausdorff",
    "iterate_attractor",
    "zadeh_extend",
]
