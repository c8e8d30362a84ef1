"""Tests for image tools."""

import json

import pytest

from gifzs.config import Config
from gifzs.serializers import parse_config
from gifzs.tools.images import get_image_tools, handle_image_tool


@pytest.fixture
def config():
    return Config()


class TestGetImageTools:
    """Tests for get_image_tools function."""

    def test_tool_names(self):
        """All image tools are present."""
        assert {tool.name for tool in get_image_tools()} == {"image_distance", "approximate_image"}

    def test_required_fields(self):
        """Paths and epsilon are required."""
        tools = {t.name: t for t in get_image_tools()}
        assert tools["image_distance"].inputSchema["required"] == ["image_a", "image_b"]
        assert tools["approximate_image"].inputSchema["required"] == ["image", "epsilon"]


class TestHandleImageTool:
    """Tests for handle_image_tool function."""

    async def test_unknown_tool_returns_none(self, config):
        """Tools of other modules are not handled."""
        assert await handle_image_tool("render_attractor", {}, config) is None

    async def test_distance(self, config, sample_pgm):
        """An image is at distance 0 from itself."""
        path, _ = sample_pgm
        result = await handle_image_tool("image_distance", {"image_a": str(path), "image_b": str(path)}, config)
        assert json.loads(result[0].text)["d_infty"] == 0.0

    async def test_distance_missing_file(self, config, sample_pgm, tmp_path):
        """Missing files are reported as errors."""
        path, _ = sample_pgm
        arguments = {"image_a": str(path), "image_b": str(tmp_path / "missing.pgm")}
        result = await handle_image_tool("image_distance", arguments, config)
        assert result[0].text.startswith("Error: FileNotFoundError")

    async def test_approximate_inline(self, config, sample_pgm):
        """Without out_config the description is returned inline."""
        path, _ = sample_pgm
        result = await handle_image_tool("approximate_image", {"image": str(path), "epsilon": 1.0}, config)
        data = json.loads(result[0].text)
        assert data["certificate"]["within_epsilon"] is True
        assert parse_config(data["config_yaml"]).build().degree == 1

    async def test_approximate_to_file(self, config, sample_pgm, tmp_path):
        """out_config writes the description."""
        path, _ = sample_pgm
        out = tmp_path / "approx.yaml"
        arguments = {"image": str(path), "epsilon": 1.0, "degree": 2, "out_config": str(out)}
        data = json.loads((await handle_image_tool("approximate_image", arguments, config))[0].text)
        assert data["config_path"] == str(out)
        assert parse_config(out.read_text()).degree == 2

    async def test_epsilon_too_small(self, config, sample_pgm):
        """Library errors come back as text."""
        path, _ = sample_pgm
        result = await handle_image_tool("approximate_image", {"image": str(path), "epsilon": 0.1}, config)
        assert result[0].text.startswith("Error: epsilon")
