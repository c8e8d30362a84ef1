"""Validation utilities for the sections of a system description."""

from typing import Optional

from .fuzzification import OPERATORS

SEED_KINDS = ("center", "full", "cell:<index>")


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _number_list(value, length: int) -> bool:
    return isinstance(value, list) and len(value) == length and all(_is_number(x) for x in value)


def validate_domain(domain: dict) -> tuple[bool, Optional[str]]:
    """
    Validate the ``domain`` section.

    Args:
        domain: Parsed domain mapping.

    Returns:
        Tuple of (is_valid, error_message).
    """
    if not isinstance(domain, dict):
        return False, "must be a mapping"
    for field in ("dim", "lo", "hi", "cells"):
        if field not in domain:
            return False, f"missing required field: {field}"
    dim = domain["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        return False, f"dim must be a positive integer, got {dim!r}"
    for field in ("lo", "hi"):
        if not _number_list(domain[field], dim):
            return False, f"{field} must be a list of {dim} numbers"
    cells = domain["cells"]
    if not (isinstance(cells, list) and len(cells) == dim and all(isinstance(n, int) and n > 0 for n in cells)):
        return False, f"cells must be a list of {dim} positive integers"
    for k, (a, b) in enumerate(zip(domain["lo"], domain["hi"])):
        if not a < b:
            return False, f"axis {k}: lo {a} must be below hi {b}"
    if "wrap" in domain and not isinstance(domain["wrap"], bool):
        return False, "wrap must be true or false"
    return True, None


def validate_system_section(system: dict) -> tuple[bool, Optional[str]]:
    """
    Validate the ``system`` section (degree, levels, permissive).

    Args:
        system: Parsed system mapping.

    Returns:
        Tuple of (is_valid, error_message).
    """
    if not isinstance(system, dict):
        return False, "must be a mapping"
    degree = system.get("degree")
    if not isinstance(degree, int) or isinstance(degree, bool) or degree < 1:
        return False, f"degree must be a positive integer, got {degree!r}"
    levels = system.get("levels", 255)
    if not isinstance(levels, int) or isinstance(levels, bool) or not 1 <= levels <= 65535:
        return False, f"levels must be an integer in 1..65535, got {levels!r}"
    if "permissive" in system and not isinstance(system["permissive"], bool):
        return False, "permissive must be true or false"
    return True, None


def validate_map_entry(entry: dict, degree: int, dim: int) -> tuple[bool, Optional[str]]:
    """
    Validate one entry of ``maps``: row-major blocks, offset and grey spec.

    Args:
        entry: Parsed map mapping.
        degree: Degree m of the system.
        dim: Dimension d of the domain.

    Returns:
        Tuple of (is_valid, error_message).
    """
    if not isinstance(entry, dict):
        return False, "must be a mapping"
    for field in ("blocks", "offset", "grey"):
        if field not in entry:
            return False, f"missing required field: {field}"
    blocks = entry["blocks"]
    expected = degree * dim * dim
    if not isinstance(blocks, list) or not all(_is_number(x) for x in blocks):
        return False, "blocks must be a list of numbers"
    if len(blocks) != expected:
        return False, f"blocks must hold {expected} entries (m·d·d, row-major), got {len(blocks)}"
    if not _number_list(entry["offset"], dim):
        return False, f"offset must be a list of {dim} numbers"
    if not isinstance(entry["grey"], (str, list)):
        return False, "grey must be a token or a list of [t, value] breakpoints"
    if "wrap" in entry and not isinstance(entry["wrap"], bool):
        return False, "wrap must be true or false"
    return True, None


def validate_seed_spec(seed: str, size: int) -> tuple[bool, Optional[str]]:
    """
    Validate a seed spec: ``center``, ``full`` or ``cell:<index>``.

    Args:
        seed: Seed spec string.
        size: Number of cells in the box.

    Returns:
        Tuple of (is_valid, error_message).
    """
    if seed in ("center", "full"):
        return True, None
    if isinstance(seed, str) and seed.startswith("cell:"):
        try:
            index = int(seed[5:])
        except ValueError:
            return False, f"seed cell index must be an integer, got {seed[5:]!r}"
        if not 0 <= index < size:
            return False, f"seed cell {index} outside 0..{size - 1}"
        return True, None
    return False, f"seed must be one of {', '.join(SEED_KINDS)}, got {seed!r}"


def validate_run_section(run: dict, size: int) -> tuple[bool, Optional[str]]:
    """
    Validate the optional ``run`` section.

    Args:
        run: Parsed run mapping.
        size: Number of cells in the box.

    Returns:
        Tuple of (is_valid, error_message).
    """
    if not isinstance(run, dict):
        return False, "must be a mapping"
    max_iter = run.get("max_iter")
    if max_iter is not None and (not isinstance(max_iter, int) or isinstance(max_iter, bool) or max_iter < 1):
        return False, f"max_iter must be a positive integer, got {max_iter!r}"
    tol = run.get("tol")
    if tol is not None and (not _is_number(tol) or tol < 0):
        return False, f"tol must be a nonnegative number, got {tol!r}"
    operator = run.get("operator", "suppush")
    if operator not in OPERATORS:
        return False, f"operator must be one of {', '.join(OPERATORS)}, got {operator!r}"
    return validate_seed_spec(run.get("seed", "center"), size)


def validate_epsilon(epsilon: float, minimum: float) -> tuple[bool, Optional[str]]:
    """
    Validate an approximation accuracy against the grid floor.

    Args:
        epsilon: Requested accuracy.
        minimum: Exclusive lower bound (four cell diagonals).

    Returns:
        Tuple of (is_valid, error_message).
    """
    if not epsilon > minimum:
        return False, f"epsilon must exceed {minimum:.6g} (four cell diagonals), got {epsilon:.6g}"
    return True, None
