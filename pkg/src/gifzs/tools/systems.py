"""MCP Tools for fuzzy systems: examples, rendering and verification."""

import asyncio

from mcp.types import TextContent, Tool

from ..commands import run_config, run_summary, verify_system
from ..config import Config
from ..errors import GifzsError
from ..images import write_decay_trace, write_pgm
from ..serializers import SystemConfig, list_examples, load_example, parse_config
from ..utils import ResponseTooLargeError, check_response_size, format_error

_SOURCE_PROPERTIES = {
    "config_yaml": {"type": "string", "description": "System description as YAML text"},
    "example": {"type": "string", "description": "Name of a shipped example system (see list_example_systems)"},
}


async def handle_system_tool(name: str, arguments: dict, config: Config) -> list[TextContent] | None:
    """Handle system tool calls. Returns None if tool not handled."""
    try:
        handlers = {
            "list_example_systems": _list_example_systems,
            "render_attractor": _render_attractor,
            "verify_system": _verify_system,
        }
        if name in handlers:
            return await handlers[name](config, arguments)
    except ResponseTooLargeError as e:
        return [TextContent(type="text", text=f"Error: {str(e)}")]
    except GifzsError as e:
        return [TextContent(type="text", text=f"Error: {str(e)}")]
    except Exception as e:
        return [TextContent(type="text", text=f"Error: {format_error(e)}")]
    return None


def get_system_tools() -> list[Tool]:
    """Get the list of system tools."""
    return [
        Tool(
            name="list_example_systems",
            description="List the shipped example systems with their descriptions",
            inputSchema={"type": "object", "properties": {}},
        ),
        Tool(
            name="render_attractor",
            description=(
                "Iterate a system to its fuzzy attractor. Returns iteration statistics; "
                "with out_path also writes the attractor as PGM and the decay trace as TSV."
            ),
            inputSchema={
                "type": "object",
                "properties": {
                    **_SOURCE_PROPERTIES,
                    "out_path": {"type": "string", "description": "PGM output path (optional)"},
                    "operator": {
                        "type": "string",
                        "enum": ["suppush", "levelset"],
                        "description": "Operator implementation (optional)",
                    },
                    "max_iter": {"type": "integer", "description": "Iteration cap (optional)"},
                },
            },
        ),
        Tool(
            name="verify_system",
            description="Check the attractor theorems on a system and report pass/fail per clause",
            inputSchema={
                "type": "object",
                "properties": {
                    **_SOURCE_PROPERTIES,
                    "samples": {"type": "integer", "description": "Random pairs for the contraction check (default: 5)"},
                },
            },
        ),
    ]


def _load_source(arguments: dict) -> SystemConfig:
    if arguments.get("config_yaml"):
        return parse_config(arguments["config_yaml"])
    if arguments.get("example"):
        return load_example(arguments["example"])
    raise ValueError("Either config_yaml or example is required")


async def _list_example_systems(config: Config, arguments: dict) -> list[TextContent]:
    """List shipped example systems."""
    return [TextContent(type="text", text=check_response_size({"examples": list_examples()}))]


async def _render_attractor(config: Config, arguments: dict) -> list[TextContent]:
    """Run a system and optionally write its attractor image."""
    system_config = _load_source(arguments)
    settings = Config(
        hausdorff_threshold=config.hausdorff_threshold,
        max_iter=arguments.get("max_iter", config.max_iter),
        tol=config.tol,
        operator=arguments.get("operator", config.operator),
        max_response_size_kb=config.max_response_size_kb,
    )
    _, run = await asyncio.to_thread(run_config, system_config, settings)
    result = {"system": system_config.name, **run_summary(run)}
    out_path = arguments.get("out_path")
    if out_path:
        write_pgm(out_path, run.attractor)
        trace_path = out_path.rsplit(".", 1)[0] + ".tsv"
        write_decay_trace(trace_path, run.decay)
        result["image"] = out_path
        result["trace"] = trace_path
    return [TextContent(type="text", text=check_response_size(result))]


async def _verify_system(config: Config, arguments: dict) -> list[TextContent]:
    """Run the verification report."""
    system_config = _load_source(arguments)
    report = await asyncio.to_thread(verify_system, system_config, config, arguments.get("samples", 5))
    return [TextContent(type="text", text=check_response_size(report))]
