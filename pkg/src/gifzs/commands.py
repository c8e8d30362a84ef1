"""Command implementations behind ``gifzs render|distance|approximate|verify``.

Each ``cmd_*`` function prints its result and returns the process exit code.
The helpers they are built on return plain data and are shared with the tool
server.
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import yaml

from .attractor import (
    AttractorRun,
    DensityCertificate,
    approximate_gifzs,
    collage,
    compare_cuts,
    iterate_attractor,
    monotone_iterate,
)
from .config import Config
from .errors import ConfigError, GifzsError
from .fuzzification import Gifzs, get_operator
from .grid import indicator, random_normal
from .images import read_pgm, write_decay_trace, write_pgm
from .metrics import d_infty, d_infty_m, hausdorff
from .serializers import SystemConfig, load_example, parse_config, serialize_config
from .utils import round_float

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_UNCONVERGED = 3

PASS = "pass"
FAIL = "fail"
SKIP = "skip"


def load_system_config(source: str) -> SystemConfig:
    """Parse a description file, or a shipped example when no such file exists."""
    path = Path(source)
    if path.is_file():
        return parse_config(path.read_text(encoding="utf-8"))
    if path.suffix in (".yaml", ".yml"):
        raise ConfigError("config", f"no such file: {source}")
    return load_example(source)


def run_config(config: SystemConfig, settings: Config | None = None) -> tuple[Gifzs, AttractorRun]:
    """Build the described system and iterate it; settings override the run section."""
    settings = settings or Config()
    system = config.build()
    max_iter = settings.max_iter if settings.max_iter is not None else config.run.max_iter
    tol = settings.tol if settings.tol is not None else config.run.tol
    operator = settings.operator or config.run.operator
    run = iterate_attractor(system, config.seeds(system), max_iter=max_iter, tol=tol, operator=operator)
    return system, run


def run_summary(run: AttractorRun) -> dict:
    return {
        "status": run.status,
        "iterations": run.iterations,
        "converged": run.converged,
        "exact": run.collapsed_exact,
        "cycle_length": run.cycle_length,
        "clamped": run.clamped,
        "operator": run.operator,
        "final_change": round_float(run.decay[-1]) if run.decay else None,
        "peak_level": run.attractor.peak,
        "support_cells": len(run.attractor.support()),
    }


def _error(message: str) -> None:
    print(f"Error: {message}", file=sys.stderr)


# ==================== render ====================


def cmd_render(
    source: str, out_path: str, trace_path: str | None = None, settings: Config | None = None
) -> int:
    """Render the attractor of a system as PGM plus a TSV decay trace."""
    try:
        config = load_system_config(source)
        _, run = run_config(config, settings)
        write_pgm(out_path, run.attractor)
    except GifzsError as e:
        _error(str(e))
        return EXIT_INVALID
    trace = Path(trace_path) if trace_path else Path(out_path).with_suffix(".tsv")
    write_decay_trace(trace, run.decay)
    print(f"{config.name or source}: {run.status} after {run.iterations} iterations -> {out_path}")
    if not run.converged:
        logger.warning("run did not converge; %s holds the last iterate", out_path)
        return EXIT_UNCONVERGED
    return EXIT_OK


# ==================== distance ====================


def image_distance(
    path_a: str,
    path_b: str,
    lo: Sequence[float] | None = None,
    hi: Sequence[float] | None = None,
    wrap: bool | None = None,
) -> float:
    """d∞ between two PGM images read on the same box.

    Raises:
        NotNormalError: If an image has no pixel at maxval
        GridMismatchError: If the images differ in size, maxval or domain
    """
    u = read_pgm(path_a, lo, hi, wrap)
    v = read_pgm(path_b, lo, hi, wrap)
    u.require_normal(f"image {path_a} (no pixel at maxval)")
    v.require_normal(f"image {path_b} (no pixel at maxval)")
    return d_infty(u, v)


def cmd_distance(
    path_a: str,
    path_b: str,
    lo: Sequence[float] | None = None,
    hi: Sequence[float] | None = None,
    wrap: bool | None = None,
) -> int:
    """Print d∞ between two images."""
    try:
        value = image_distance(path_a, path_b, lo, hi, wrap)
    except (GifzsError, OSError) as e:
        _error(str(e))
        return EXIT_INVALID
    print(f"{value:.12g}")
    return EXIT_OK


# ==================== approximate ====================


def approximate_image(
    image_path: str,
    epsilon: float,
    degree: int = 1,
    name: str | None = None,
    lo: Sequence[float] | None = None,
    hi: Sequence[float] | None = None,
    max_iter: int | None = None,
) -> tuple[SystemConfig, DensityCertificate]:
    """Approximating system for an image, as a description plus its certificate."""
    target = read_pgm(image_path, lo, hi)
    system, certificate = approximate_gifzs(target, epsilon, degree, max_iter=max_iter)
    config = SystemConfig.from_system(
        system,
        name=name or Path(image_path).stem,
        description=f"approximation of {Path(image_path).name} within epsilon {epsilon:g}",
    )
    return config, certificate


def certificate_summary(certificate: DensityCertificate, maps: int) -> dict:
    report = certificate.collage
    return {
        "maps": maps,
        "epsilon": certificate.epsilon,
        "scale": round_float(certificate.scale),
        "residual": round_float(report.residual),
        "lipschitz": round_float(report.lipschitz),
        "bound": round_float(report.bound),
        "distance": round_float(report.actual),
        "within_epsilon": certificate.within_epsilon,
    }


def cmd_approximate(
    image_path: str,
    epsilon: float,
    out_config: str | None = None,
    degree: int = 1,
    settings: Config | None = None,
) -> int:
    """Write an approximating system description and print its certificate.

    The certificate goes to stderr when the description itself is printed.
    """
    settings = settings or Config()
    try:
        config, certificate = approximate_image(image_path, epsilon, degree, max_iter=settings.max_iter)
    except (GifzsError, OSError) as e:
        _error(str(e))
        return EXIT_INVALID
    text = serialize_config(config)
    summary = yaml.safe_dump(certificate_summary(certificate, len(config.maps)), sort_keys=False)
    if out_config:
        Path(out_config).write_text(text, encoding="utf-8")
        print(summary, end="")
    else:
        print(text, end="")
        print(summary, end="", file=sys.stderr)
    return EXIT_OK


# ==================== verify ====================


def _check(clause: str, ok: bool | None, detail: str = "") -> dict:
    status = SKIP if ok is None else (PASS if ok else FAIL)
    return {"clause": clause, "status": status, "detail": detail}


def verify_system(
    config: SystemConfig, settings: Config | None = None, samples: int = 5, seed: int = 0
) -> dict:
    """Check the theorems about a system on its computed attractor.

    Returns a report with one entry per clause; ``passed`` is true iff no
    entry failed.
    """
    system, run = run_config(config, settings)
    rng = np.random.default_rng(seed)
    box = system.box
    levels = system.levels
    m = system.degree
    diagonal = box.diagonal
    checks = [_check("converged", run.converged, f"{run.status} after {run.iterations} iterations")]

    suppush = get_operator("suppush")
    levelset = get_operator("levelset")
    operands = [random_normal(box, levels, rng) for _ in range(m)]
    agree = suppush(system, *operands) == levelset(system, *operands)
    agree = agree and suppush(system, *([run.attractor] * m)) == levelset(system, *([run.attractor] * m))
    checks.append(_check("operators agree", agree))

    violations = 0
    for _ in range(samples):
        us = [random_normal(box, levels, rng) for _ in range(m)]
        vs = [random_normal(box, levels, rng) for _ in range(m)]
        lhs = d_infty(suppush(system, *us), suppush(system, *vs))
        if lhs > system.lipschitz * d_infty_m(us, vs) + 2 * diagonal:
            violations += 1
    checks.append(_check("contraction", violations == 0, f"{violations} of {samples} samples violate"))

    if not run.converged:
        for clause in ("(1) 0-cut in A_S", "(2) A_S' in 1-cut", "(3) crisp", "collage", "monotone"):
            checks.append(_check(clause, None, "run did not converge"))
        return _report(config, run, checks)

    cuts = compare_cuts(system, run)
    checks.append(_check("(1) 0-cut in A_S", cuts.zero_cut_contained, f"excess {cuts.zero_cut_excess:.6g}"))
    checks.append(
        _check(
            "0-cut = A_S",
            cuts.zero_cut_distance <= cuts.tolerance if cuts.zero_cut_equality_expected else None,
            f"distance {cuts.zero_cut_distance:.6g}",
        )
    )
    checks.append(_check("(2) A_S' in 1-cut", cuts.one_cut_contains, f"deficit {cuts.one_cut_deficit:.6g}"))
    checks.append(
        _check(
            "1-cut = A_S'",
            cuts.one_cut_distance <= cuts.tolerance if cuts.one_cut_equality_expected else None,
            f"distance {cuts.one_cut_distance:.6g}",
        )
    )
    checks.append(_check("(3) crisp", cuts.crisp if cuts.all_top else None))
    # With both cut equalities in force, A_S ≠ A_S' leaves cells strictly between 0 and 1
    separated = hausdorff(cuts.full_system.attractor, cuts.top_system.attractor).value > 3 * cuts.tolerance
    forced = separated and cuts.zero_cut_equality_expected and cuts.one_cut_equality_expected
    values = run.attractor.values
    fuzzy = bool(np.any((values > 0) & (values < levels)))
    checks.append(_check("not crisp", fuzzy if forced and not cuts.all_top else None))

    crisp_indicator = indicator(cuts.full_system.attractor, levels)
    report = collage(system, crisp_indicator, run.attractor, run.operator)
    checks.append(
        _check("collage", report.holds, f"distance {report.actual:.6g}, bound {report.bound:.6g}")
    )
    monotone = monotone_iterate(system, crisp_indicator, operator=run.operator, tol=run.tol)
    checks.append(
        _check(
            "monotone",
            monotone.comparable and monotone.monotone and monotone.bounded,
            monotone.direction,
        )
    )
    return _report(config, run, checks)


def _report(config: SystemConfig, run: AttractorRun, checks: list[dict]) -> dict:
    return {
        "system": config.name,
        "run": run_summary(run),
        "checks": checks,
        "passed": all(c["status"] != FAIL for c in checks),
    }


def cmd_verify(source: str, settings: Config | None = None, samples: int = 5, seed: int = 0) -> int:
    """Print a pass/fail report per theorem clause; exit 0 iff nothing failed."""
    try:
        config = load_system_config(source)
        report = verify_system(config, settings, samples, seed)
    except GifzsError as e:
        _error(str(e))
        return EXIT_INVALID
    for check in report["checks"]:
        line = f"{check['clause']}: {check['status']}"
        if check["detail"]:
            line += f" ({check['detail']})"
        print(line)
    return EXIT_OK if report["passed"] else EXIT_VERIFY_FAILED
