"""Pytest configuration and fixtures."""

import numpy as np
import pytest

from gifzs.fuzzification import Gifzs
from gifzs.grey import GreyLevelMap, GreySystem, identity, scale, zero
from gifzs.grid import DomainBox, FuzzyGrid
from gifzs.images import write_pgm
from gifzs.metrics import DEFAULT_BRUTEFORCE_THRESHOLD, set_bruteforce_threshold
from gifzs.systems import AffineContraction, CrispGifs
from gifzs.utils import DEFAULT_MAX_RESPONSE_SIZE, set_max_response_size

THIRD = 1 / 3
TWO_THIRDS = 2 / 3

# Cantor cells on 27 cells: base-3 digits in {0, 2}
CANTOR_27 = {0, 2, 6, 8, 18, 20, 24, 26}


@pytest.fixture(autouse=True)
def reset_module_settings():
    """Restore module-level thresholds changed by a test."""
    yield
    set_bruteforce_threshold(DEFAULT_BRUTEFORCE_THRESHOLD)
    set_max_response_size(DEFAULT_MAX_RESPONSE_SIZE // 1024)


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(20240611)


@pytest.fixture
def line16():
    """Unit interval with 16 cells."""
    return DomainBox.unit(16)


def make_cantor(cells: int = 27, levels: int = 8, right_grey=None) -> Gifzs:
    """Middle-thirds system with identity grey on the left map."""
    box = DomainBox.unit(cells)
    maps = (
        AffineContraction((np.array([[THIRD]]),), np.array([0.0])),
        AffineContraction((np.array([[THIRD]]),), np.array([TWO_THIRDS])),
    )
    right = right_grey if right_grey is not None else identity(levels)
    return Gifzs(CrispGifs(box, maps), GreySystem((identity(levels), right)))


def make_doubling(cells: int = 16, levels: int = 8) -> Gifzs:
    """Degree-2 circle system φ_j(x, y) = x/2 + j/2 with identity grey maps."""
    box = DomainBox.unit(cells, wrap=True)
    maps = tuple(
        AffineContraction((np.array([[0.5]]), np.array([[0.0]])), np.array([j / 2]), wrap=True) for j in (0, 1)
    )
    return Gifzs(CrispGifs(box, maps), GreySystem((identity(levels), identity(levels))))


def make_quarter_sum(cells: int = 64, levels: int = 8, boundary: bool = False) -> Gifzs:
    """Degree-2 system φ_j(x, y) = x/4 + y/4 + j/2 on [0, 1]."""
    box = DomainBox.unit(cells)
    maps = tuple(
        AffineContraction((np.array([[0.25]]), np.array([[0.25]])), np.array([j / 2])) for j in (0, 1)
    )
    if boundary:
        greys = GreySystem((identity(levels), zero(levels)))
    else:
        greys = GreySystem((scale(0.5, levels), identity(levels)))
    return Gifzs(CrispGifs(box, maps), greys, permissive=boundary)


def random_grey(rng: np.random.Generator, levels: int, top: bool) -> GreyLevelMap:
    """Random admissible grey map; reaches level L when ``top``."""
    samples = np.sort(rng.integers(0, levels + 1, size=levels + 1))
    samples[0] = 0
    samples[-1] = levels if top else max(int(samples[-1]), 1)
    return GreyLevelMap(np.sort(samples))


def random_system(
    rng: np.random.Generator,
    cells: tuple[int, ...] = (12,),
    degree: int = 1,
    maps: int = 2,
    levels: int = 6,
    wrap: bool = False,
) -> Gifzs:
    """Random contractive affine system with random admissible grey maps."""
    box = DomainBox((0.0,) * len(cells), (1.0,) * len(cells), cells, wrap)
    dim = len(cells)
    fs = []
    for _ in range(maps):
        blocks = []
        for _ in range(degree):
            a = rng.uniform(-1.0, 1.0, size=(dim, dim))
            a *= rng.uniform(0.2, 0.85) / (degree * np.linalg.norm(a, 2))
            blocks.append(a)
        fs.append(AffineContraction(tuple(blocks), rng.uniform(0.0, 0.6, size=dim), wrap=wrap))
    greys = tuple(random_grey(rng, levels, top=(j == 0)) for j in range(maps))
    return Gifzs(CrispGifs(box, tuple(fs)), GreySystem(greys))


def random_grid(rng: np.random.Generator, box: DomainBox, levels: int, density: float = 0.5) -> FuzzyGrid:
    """Random normal fuzzy grid."""
    values = rng.integers(1, levels + 1, size=box.size) * (rng.random(box.size) < density)
    values[rng.integers(box.size)] = levels
    return FuzzyGrid(box, values, levels)


@pytest.fixture
def cantor():
    """Crisp-grey Cantor system on 27 cells."""
    return make_cantor()


@pytest.fixture
def non_crisp_cantor():
    """Cantor system whose right map halves memberships."""
    return make_cantor(right_grey=scale(0.5, 8))


@pytest.fixture
def doubling():
    """Circle doubling system on 16 cells."""
    return make_doubling()


@pytest.fixture
def sample_pgm(tmp_path):
    """A small normal 2-D image written with its domain sidecar."""
    box = DomainBox((0.0, 0.0), (1.0, 1.0), (8, 8))
    values = np.zeros((8, 8), dtype=np.int32)
    values[2:6, 2:6] = 4
    values[3:5, 3:5] = 8
    u = FuzzyGrid(box, values.reshape(-1), 8)
    path = tmp_path / "square.pgm"
    write_pgm(path, u)
    return path, u
