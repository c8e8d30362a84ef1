"""MCP Tools for images: distances and approximation."""

import asyncio
from pathlib import Path

from mcp.types import TextContent, Tool

from ..commands import approximate_image, certificate_summary, image_distance
from ..config import Config
from ..errors import GifzsError
from ..serializers import serialize_config
from ..utils import ResponseTooLargeError, check_response_size, format_error, round_float


async def handle_image_tool(name: str, arguments: dict, config: Config) -> list[TextContent] | None:
    """Handle image tool calls. Returns None if tool not handled."""
    try:
        handlers = {
            "image_distance": _image_distance,
            "approximate_image": _approximate_image,
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


def get_image_tools() -> list[Tool]:
    """Get the list of image tools."""
    return [
        Tool(
            name="image_distance",
            description="Compute the d_infty distance between two PGM images of normal fuzzy sets",
            inputSchema={
                "type": "object",
                "properties": {
                    "image_a": {"type": "string", "description": "Path to the first PGM image"},
                    "image_b": {"type": "string", "description": "Path to the second PGM image"},
                    "lo": {"type": "array", "items": {"type": "number"}, "description": "Lower box corner"},
                    "hi": {"type": "array", "items": {"type": "number"}, "description": "Upper box corner"},
                    "wrap": {"type": "boolean", "description": "Treat the box as a torus"},
                },
                "required": ["image_a", "image_b"],
            },
        ),
        Tool(
            name="approximate_image",
            description=(
                "Build a system whose fuzzy attractor lies within epsilon of a PGM image. "
                "Returns the certificate and the system description (or writes it to out_config)."
            ),
            inputSchema={
                "type": "object",
                "properties": {
                    "image": {"type": "string", "description": "Path to the target PGM image"},
                    "epsilon": {"type": "number", "description": "Target accuracy (above four cell diagonals)"},
                    "degree": {"type": "integer", "description": "Degree of the emitted system (default: 1)"},
                    "out_config": {"type": "string", "description": "Path for the YAML description (optional)"},
                },
                "required": ["image", "epsilon"],
            },
        ),
    ]


async def _image_distance(config: Config, arguments: dict) -> list[TextContent]:
    """Distance between two images."""
    value = await asyncio.to_thread(
        image_distance,
        arguments["image_a"],
        arguments["image_b"],
        arguments.get("lo"),
        arguments.get("hi"),
        arguments.get("wrap"),
    )
    result = {"image_a": arguments["image_a"], "image_b": arguments["image_b"], "d_infty": round_float(value)}
    return [TextContent(type="text", text=check_response_size(result))]


async def _approximate_image(config: Config, arguments: dict) -> list[TextContent]:
    """Approximate an image by a fuzzy attractor."""
    system_config, certificate = await asyncio.to_thread(
        approximate_image,
        arguments["image"],
        float(arguments["epsilon"]),
        int(arguments.get("degree", 1)),
        None,
        None,
        None,
        config.max_iter,
    )
    result = {"certificate": certificate_summary(certificate, len(system_config.maps))}
    text = serialize_config(system_config)
    out_config = arguments.get("out_config")
    if out_config:
        Path(out_config).write_text(text, encoding="utf-8")
        result["config_path"] = out_config
    else:
        result["config_yaml"] = text
    return [TextContent(type="text", text=check_response_size(result))]
