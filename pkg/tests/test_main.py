"""Tests for the command line entry point."""

import pytest

from gifzs.__main__ import _parse_bool, _parse_coords, build_parser, main


class TestParser:
    """Tests for argument parsing."""

    def test_render_arguments(self):
        """Global options come before the subcommand."""
        args = build_parser().parse_args(["--max-iter", "5", "render", "cantor", "-o", "out.pgm"])
        assert args.command == "render"
        assert args.max_iter == 5
        assert args.out == "out.pgm"
        assert args.trace is None

    def test_distance_coordinates(self):
        """--lo and --hi take comma-separated numbers."""
        args = build_parser().parse_args(["distance", "a.pgm", "b.pgm", "--lo", "0,-1", "--wrap", "yes"])
        assert args.lo == [0.0, -1.0]
        assert args.wrap is True

    def test_parse_bool(self):
        """Boolean words are accepted in both cases."""
        assert _parse_bool("OFF") is False
        assert _parse_bool("True") is True

    def test_parse_coords_error(self):
        """Non-numeric coordinates are rejected."""
        with pytest.raises(Exception, match="Invalid coordinates"):
            _parse_coords("a,b")

    def test_command_required(self):
        """A subcommand is required."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestMain:
    """Tests for main."""

    def test_render(self, tmp_path):
        """A converged render exits 0."""
        with pytest.raises(SystemExit) as exc:
            main(["render", "cantor", "-o", str(tmp_path / "c.pgm")])
        assert exc.value.code == 0
        assert (tmp_path / "c.tsv").exists()

    def test_invalid_max_iter(self, tmp_path, capsys, monkeypatch):
        """Invalid settings exit 2."""
        monkeypatch.delenv("GIFZS_MAX_ITER", raising=False)
        with pytest.raises(SystemExit) as exc:
            main(["--max-iter", "0", "render", "cantor", "-o", str(tmp_path / "c.pgm")])
        assert exc.value.code == 2
        assert "Configuration error" in capsys.readouterr().err

    def test_unconverged(self, tmp_path):
        """A capped run exits 3."""
        with pytest.raises(SystemExit) as exc:
            main(["--max-iter", "1", "render", "cantor", "-o", str(tmp_path / "c.pgm")])
        assert exc.value.code == 3

    def test_verify(self, capsys):
        """verify prints one line per clause."""
        with pytest.raises(SystemExit) as exc:
            main(["verify", "cantor", "--samples", "2"])
        assert exc.value.code == 0
        assert "converged: pass" in capsys.readouterr().out
