"""Serialization of fuzzy systems to and from YAML system descriptions.

A description has the sections ``domain``, ``system``, ``maps`` (each map with
its row-major blocks, offset and grey spec) and an optional ``run``::

    name: quarter-sum
    domain: {dim: 1, lo: [0.0], hi: [1.0], cells: [512], wrap: false}
    system: {degree: 2, levels: 255, permissive: false}
    maps:
      - {blocks: [0.25, 0.25], offset: [0.0], grey: "scale:1/2"}
      - {blocks: [0.25, 0.25], offset: [0.5], grey: id}
    run: {max_iter: null, tol: 0.0, seed: center, operator: suppush}
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import yaml

from .errors import ConfigError, GreyMapError, InadmissibleError, NotContractiveError
from .fuzzification import Gifzs
from .grey import GreySpec, GreySystem, format_grey_spec, parse_grey_spec
from .grid import CrispCellSet, DomainBox, FuzzyGrid, indicator
from .systems import AffineContraction, CrispGifs
from .validators import validate_domain, validate_map_entry, validate_run_section, validate_system_section

EXAMPLES_PACKAGE = "gifzs.data"


@dataclass
class DomainConfig:
    lo: list[float]
    hi: list[float]
    cells: list[int]
    wrap: bool = False

    @property
    def dim(self) -> int:
        return len(self.cells)

    def box(self) -> DomainBox:
        return DomainBox(tuple(self.lo), tuple(self.hi), tuple(self.cells), self.wrap)


@dataclass
class MapConfig:
    blocks: list[float]
    offset: list[float]
    grey: GreySpec
    wrap: bool = False


@dataclass
class RunConfig:
    max_iter: int | None = None
    # None: one cell diagonal of the box
    tol: float | None = None
    seed: str = "center"
    operator: str = "suppush"


@dataclass
class SystemConfig:
    """A parsed system description; ``build`` turns it into a Gifzs."""

    name: str
    domain: DomainConfig
    degree: int
    maps: list[MapConfig]
    levels: int = 255
    permissive: bool = False
    description: str = ""
    run: RunConfig = field(default_factory=RunConfig)

    def build(self) -> Gifzs:
        """Construct the system; failures become ConfigErrors without a line number."""
        box = self.domain.box()
        maps = []
        greys = []
        for j, entry in enumerate(self.maps):
            maps.append(
                AffineContraction.from_flat(self.degree, self.domain.dim, entry.blocks, entry.offset, entry.wrap)
            )
            try:
                greys.append(parse_grey_spec(entry.grey, self.levels))
            except GreyMapError as e:
                raise ConfigError(f"maps[{j}].grey", str(e))
        try:
            gifs = CrispGifs(box, tuple(maps))
        except NotContractiveError as e:
            raise ConfigError(f"maps[{e.index}]", str(e))
        try:
            return Gifzs(gifs, GreySystem(tuple(greys)), self.permissive)
        except InadmissibleError as e:
            where = f"maps[{e.index}].grey" if e.index is not None else "maps"
            raise ConfigError(where, str(e))

    def seeds(self, system: Gifzs) -> list[FuzzyGrid] | None:
        """Seed tuple named by ``run.seed``; None selects the driver's default."""
        spec = self.run.seed
        if spec == "center":
            return None
        box = system.box
        if spec == "full":
            cells = CrispCellSet.full(box)
        else:
            cells = CrispCellSet.from_cells(box, [int(spec.split(":", 1)[1])])
        return [indicator(cells, system.levels)] * system.degree

    @classmethod
    def from_system(
        cls, system: Gifzs, name: str, description: str = "", run: RunConfig | None = None
    ) -> SystemConfig:
        """Description of an existing system, e.g. one produced by approximation."""
        box = system.box
        maps = [
            MapConfig(
                blocks=f.flat_blocks(),
                offset=[float(x) for x in f.offset],
                grey=format_grey_spec(rho),
                wrap=f.wrap,
            )
            for f, rho in zip(system.gifs.maps, system.greys)
        ]
        return cls(
            name=name,
            description=description,
            domain=DomainConfig(list(box.lo), list(box.hi), list(box.cells), box.wrap),
            degree=system.degree,
            levels=system.levels,
            permissive=system.permissive,
            maps=maps,
            run=run or RunConfig(),
        )


def _node_line(node: yaml.Node | None, path: tuple) -> int | None:
    """1-based line of the node at ``path`` (or of its deepest existing ancestor)."""
    if node is None:
        return None
    line = node.start_mark.line + 1
    for key in path:
        child = None
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                if k.value == key:
                    child = v
                    break
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            child = node.value[key]
        if child is None:
            break
        node = child
        line = node.start_mark.line + 1
    return line


def _path_of(field_name: str) -> tuple:
    """``maps[1].grey`` -> ("maps", 1, "grey")."""
    path: list = []
    for part in field_name.split("."):
        name, _, rest = part.partition("[")
        path.append(name)
        if rest:
            path.append(int(rest.rstrip("]")))
    return tuple(path)


def parse_config(text: str) -> SystemConfig:
    """Parse and fully validate a YAML system description.

    Raises:
        ConfigError: Naming the field, the violated constraint and the line
    """
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError("yaml", str(getattr(e, "problem", None) or e), mark.line + 1 if mark else None)
    if not isinstance(data, dict):
        raise ConfigError("document", "must be a mapping", _node_line(root, ()))

    def fail(field_name: str, message: str):
        raise ConfigError(field_name, message, _node_line(root, _path_of(field_name)))

    for section in ("domain", "system", "maps"):
        if section not in data:
            fail(section, "is required")

    ok, error = validate_domain(data["domain"])
    if not ok:
        fail("domain", error)
    domain = DomainConfig(
        lo=[float(x) for x in data["domain"]["lo"]],
        hi=[float(x) for x in data["domain"]["hi"]],
        cells=list(data["domain"]["cells"]),
        wrap=data["domain"].get("wrap", False),
    )

    ok, error = validate_system_section(data["system"])
    if not ok:
        fail("system", error)
    degree = data["system"]["degree"]

    if not isinstance(data["maps"], list) or not data["maps"]:
        fail("maps", "must be a nonempty list")
    maps = []
    for j, entry in enumerate(data["maps"]):
        ok, error = validate_map_entry(entry, degree, domain.dim)
        if not ok:
            fail(f"maps[{j}]", error)
        maps.append(
            MapConfig(
                blocks=[float(x) for x in entry["blocks"]],
                offset=[float(x) for x in entry["offset"]],
                grey=entry["grey"],
                wrap=entry.get("wrap", False),
            )
        )

    run_data = data.get("run") or {}
    ok, error = validate_run_section(run_data, int(np.prod(domain.cells)))
    if not ok:
        fail("run", error)
    run = RunConfig(
        max_iter=run_data.get("max_iter"),
        tol=float(run_data["tol"]) if run_data.get("tol") is not None else None,
        seed=run_data.get("seed", "center"),
        operator=run_data.get("operator", "suppush"),
    )

    config = SystemConfig(
        name=str(data.get("name", "")),
        description=str(data.get("description", "")),
        domain=domain,
        degree=degree,
        levels=data["system"].get("levels", 255),
        permissive=data["system"].get("permissive", False),
        maps=maps,
        run=run,
    )
    try:
        config.build()
    except ConfigError as e:
        fail(e.field, e.message)
    return config


def serialize_config(config: SystemConfig) -> str:
    """YAML text that parse_config reads back into an equal SystemConfig."""
    data = {
        "name": config.name,
        "description": config.description,
        "domain": {
            "dim": config.domain.dim,
            "lo": list(config.domain.lo),
            "hi": list(config.domain.hi),
            "cells": list(config.domain.cells),
            "wrap": config.domain.wrap,
        },
        "system": {"degree": config.degree, "levels": config.levels, "permissive": config.permissive},
        "maps": [
            {"blocks": list(m.blocks), "offset": list(m.offset), "grey": m.grey, "wrap": m.wrap} for m in config.maps
        ],
        "run": {
            "max_iter": config.run.max_iter,
            "tol": config.run.tol,
            "seed": config.run.seed,
            "operator": config.run.operator,
        },
    }
    return yaml.safe_dump(data, sort_keys=False, allow_unicode=True, default_flow_style=None)


def list_examples() -> list[dict]:
    """Names and descriptions of the shipped example systems."""
    out = []
    for entry in sorted(resources.files(EXAMPLES_PACKAGE).iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".yaml"):
            data = yaml.safe_load(entry.read_text(encoding="utf-8"))
            out.append({"name": entry.name[: -len(".yaml")], "description": data.get("description", "")})
    return out


def example_text(name: str) -> str:
    """YAML text of a shipped example system.

    Raises:
        ConfigError: If no example has that name
    """
    entry = resources.files(EXAMPLES_PACKAGE).joinpath(f"{name}.yaml")
    if not entry.is_file():
        known = ", ".join(e["name"] for e in list_examples())
        raise ConfigError("example", f"unknown example {name!r}; known: {known}")
    return entry.read_text(encoding="utf-8")


def load_example(name: str) -> SystemConfig:
    return parse_config(example_text(name))
