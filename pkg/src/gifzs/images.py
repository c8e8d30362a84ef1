"""Binary PGM (P5) images of fuzzy grids, domain sidecars and decay traces.

Axis 0 of the box runs left to right, axis 1 bottom to top, so the top image
row holds the highest axis-1 cells. One-dimensional grids are height-1 strips.
The grey value of a pixel is the cell's level and maxval is L; levels above
255 are stored as two big-endian bytes per pixel.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import yaml

from .errors import ImageFormatError
from .grid import DomainBox, FuzzyGrid

logger = logging.getLogger(__name__)

_HEADER_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")

TRACE_HEADER = "iter\td_infty_change"


def grid_to_image(u: FuzzyGrid) -> np.ndarray:
    """Pixel array (height, width) of a 1-D or 2-D grid."""
    cells = u.box.cells
    if len(cells) == 1:
        return u.values.reshape(1, cells[0])
    if len(cells) == 2:
        return u.as_array().T[::-1]
    raise ImageFormatError(f"only 1-D and 2-D grids can be written as images, got {len(cells)}-D")


def image_to_grid(pixels: np.ndarray, levels: int, box: DomainBox) -> FuzzyGrid:
    """Inverse of grid_to_image for a box of matching shape."""
    pixels = np.asarray(pixels)
    height, width = pixels.shape
    if box.dim == 1:
        if height != 1 or box.cells != (width,):
            raise ImageFormatError(f"image {width}x{height} does not fit a {box.cells[0]}-cell line")
        return FuzzyGrid(box, pixels.reshape(-1), levels)
    if box.dim == 2 and box.cells == (width, height):
        return FuzzyGrid(box, pixels[::-1].T.reshape(-1), levels)
    raise ImageFormatError(f"image {width}x{height} does not fit box cells {box.cells}")


def encode_pgm(u: FuzzyGrid) -> bytes:
    pixels = grid_to_image(u)
    height, width = pixels.shape
    if u.levels > 65535:
        raise ImageFormatError(f"PGM maxval is at most 65535, grid has {u.levels} levels")
    dtype = np.dtype(">u2") if u.levels > 255 else np.dtype("u1")
    header = f"P5\n{width} {height}\n{u.levels}\n".encode("ascii")
    return header + np.ascontiguousarray(pixels, dtype=dtype).tobytes()


def decode_pgm(data: bytes) -> tuple[np.ndarray, int]:
    """Parse P5 bytes into (pixels of shape (height, width), maxval).

    Raises:
        ImageFormatError: If the header or payload is malformed
    """
    tokens = []
    pos = 0
    for _ in range(4):
        match = _HEADER_TOKEN.match(data, pos)
        if match is None:
            raise ImageFormatError("truncated PGM header")
        tokens.append(match.group(1))
        pos = match.end()
    if tokens[0] != b"P5":
        raise ImageFormatError(f"not a binary PGM (magic {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ImageFormatError("PGM header fields must be integers")
    if width < 1 or height < 1 or not 0 < maxval <= 65535:
        raise ImageFormatError(f"invalid PGM header {width}x{height} maxval {maxval}")
    # Exactly one whitespace byte separates the header from the raster
    pos += 1
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    expected = width * height * dtype.itemsize
    payload = data[pos : pos + expected]
    if len(payload) != expected:
        raise ImageFormatError(f"PGM raster has {len(payload)} bytes, expected {expected}")
    pixels = np.frombuffer(payload, dtype=dtype).reshape(height, width).astype(np.int32)
    if pixels.max() > maxval:
        raise ImageFormatError(f"pixel value {int(pixels.max())} exceeds maxval {maxval}")
    return pixels, maxval


def sidecar_path(path: str | Path) -> Path:
    """Domain declaration stored next to an image: ``name.pgm`` -> ``name.domain.yaml``."""
    path = Path(path)
    return path.with_name(path.stem + ".domain.yaml")


def write_sidecar(path: str | Path, box: DomainBox) -> Path:
    target = sidecar_path(path)
    data = {"lo": list(box.lo), "hi": list(box.hi), "wrap": box.wrap}
    target.write_text(yaml.safe_dump(data, sort_keys=False), encoding="utf-8")
    return target


def read_sidecar(path: str | Path) -> dict | None:
    target = sidecar_path(path)
    if not target.exists():
        return None
    data = yaml.safe_load(target.read_text(encoding="utf-8")) or {}
    if not isinstance(data, dict):
        raise ImageFormatError(f"{target}: domain declaration must be a mapping")
    return data


def write_pgm(path: str | Path, u: FuzzyGrid, sidecar: bool = True) -> None:
    """Write a grid as PGM, plus its domain sidecar unless disabled."""
    Path(path).write_bytes(encode_pgm(u))
    if sidecar:
        write_sidecar(path, u.box)
    logger.debug("wrote %s (%s cells, maxval %d)", path, u.box.cells, u.levels)


def read_pgm(
    path: str | Path,
    lo: Sequence[float] | None = None,
    hi: Sequence[float] | None = None,
    wrap: bool | None = None,
    one_dimensional: bool | None = None,
) -> FuzzyGrid:
    """Read a PGM file as a fuzzy grid with L = maxval.

    Box bounds come from the arguments, then the domain sidecar, then the unit
    box. Height-1 images are read as 1-D grids unless ``one_dimensional`` is False.
    """
    pixels, maxval = decode_pgm(Path(path).read_bytes())
    height, width = pixels.shape
    side = read_sidecar(path) or {}
    if one_dimensional is None:
        one_dimensional = height == 1 and len(side.get("lo", [0.0])) == 1
    cells = (width,) if one_dimensional else (width, height)
    dim = len(cells)
    lo = tuple(lo) if lo is not None else tuple(side.get("lo", (0.0,) * dim))
    hi = tuple(hi) if hi is not None else tuple(side.get("hi", (1.0,) * dim))
    wrap = wrap if wrap is not None else bool(side.get("wrap", False))
    if len(lo) != dim or len(hi) != dim:
        raise ImageFormatError(f"{path}: domain bounds must have {dim} coordinates")
    return image_to_grid(pixels, maxval, DomainBox(lo, hi, cells, wrap))


def write_decay_trace(path: str | Path, decay: Sequence[float]) -> None:
    """TSV trace: header, then one ``iteration<TAB>change`` line per step."""
    lines = [TRACE_HEADER]
    lines.extend(f"{k}\t{value:.12g}" for k, value in enumerate(decay, start=1))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_decay_trace(path: str | Path) -> list[float]:
    rows = Path(path).read_text(encoding="utf-8").splitlines()
    if not rows or rows[0] != TRACE_HEADER:
        raise ImageFormatError(f"{path}: missing decay trace header")
    return [float(row.split("\t")[1]) for row in rows[1:] if row]
