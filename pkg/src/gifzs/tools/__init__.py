"""MCP Tools for fuzzy systems and images."""

from .images import get_image_tools, handle_image_tool
from .systems import get_system_tools, handle_system_tool

__all__ = [
    "get_image_tools",
    "handle_image_tool",
    "get_system_tools",
    "handle_system_tool",
]
