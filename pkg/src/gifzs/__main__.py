"""Entry point for the gifzs command line."""

import argparse
import asyncio
import logging
import sys

from .commands import EXIT_INVALID, cmd_approximate, cmd_distance, cmd_render, cmd_verify
from .config import Config
from .metrics import set_bruteforce_threshold
from .server import run_server


def _parse_bool(value: str) -> bool:
    """Parse --wrap argument value."""
    if value.lower() in ("false", "0", "no", "off"):
        return False
    if value.lower() in ("true", "1", "yes", "on"):
        return True
    raise argparse.ArgumentTypeError(
        f"Invalid value '{value}'. Use 'true', 'false', '1', '0', 'yes', 'no', 'on', or 'off'."
    )


def _parse_coords(value: str) -> list[float]:
    """Parse comma-separated coordinates such as '0,0' or '-1.5,2'."""
    try:
        return [float(x) for x in value.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid coordinates '{value}'. Use comma-separated numbers.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gifzs",
        description="Fuzzy fractal attractors of generalized iterated fuzzy function systems",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Environment variables:
  GIFZS_HAUSDORFF_THRESHOLD   Cell-pair count above which Hausdorff uses a distance transform (default: 1000000)
  GIFZS_MAX_ITER              Iteration cap overriding system descriptions
  GIFZS_TOL                   d_infty stopping tolerance overriding system descriptions (0 = exact only)
  GIFZS_OPERATOR              Operator implementation: suppush or levelset
  GIFZS_MAX_RESPONSE_SIZE_KB  Maximum tool-server response size in KB (default: 64)

Exit codes:
  0 success, 1 verification failure, 2 parse/validation error, 3 unconverged

Examples:
  gifzs render doubling-s1 -o doubling.pgm
  gifzs render my-system.yaml -o out.pgm --trace out.tsv --operator levelset
  gifzs distance a.pgm b.pgm --lo 0,0 --hi 1,1
  gifzs approximate disk.pgm --epsilon 0.1 -o disk.yaml
  gifzs verify non-crisp-recipe
  gifzs serve
        """,
    )
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    parser.add_argument(
        "--hausdorff-threshold",
        type=int,
        metavar="PAIRS",
        help="Cell-pair count above which Hausdorff distances use the accelerated path",
    )
    parser.add_argument("--max-iter", type=int, metavar="N", help="Iteration cap (default: derived per system)")
    parser.add_argument(
        "--tol",
        type=float,
        help="d_infty stopping tolerance (default: the description's, else one cell diagonal; 0 = exact only)",
    )
    parser.add_argument("--operator", choices=("suppush", "levelset"), help="Operator implementation")
    parser.add_argument(
        "--max-response-size", type=int, metavar="KB", help="Maximum tool-server response size in kilobytes"
    )

    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="Render the attractor of a system as PGM")
    render.add_argument("config", help="System description file or shipped example name")
    render.add_argument("-o", "--out", required=True, help="Output PGM path")
    render.add_argument("--trace", help="Decay trace path (default: output path with .tsv suffix)")

    distance = sub.add_parser("distance", help="Print d_infty between two PGM images")
    distance.add_argument("image_a")
    distance.add_argument("image_b")
    distance.add_argument("--lo", type=_parse_coords, help="Lower box corner (default: sidecar or 0)")
    distance.add_argument("--hi", type=_parse_coords, help="Upper box corner (default: sidecar or 1)")
    distance.add_argument("--wrap", type=_parse_bool, metavar="BOOL", help="Treat the box as a torus")

    approximate = sub.add_parser("approximate", help="Build a system whose attractor approximates an image")
    approximate.add_argument("image")
    approximate.add_argument("--epsilon", type=float, required=True, help="Target accuracy in d_infty")
    approximate.add_argument("-o", "--out", help="Output description path (default: stdout)")
    approximate.add_argument("--degree", type=int, default=1, help="Degree of the emitted system (default: 1)")

    verify = sub.add_parser("verify", help="Check the attractor theorems on a system")
    verify.add_argument("config", help="System description file or shipped example name")
    verify.add_argument("--samples", type=int, default=5, help="Random pairs for the contraction check")
    verify.add_argument("--seed", type=int, default=0, help="Random seed for sampled checks")

    sub.add_parser("serve", help="Run the MCP tool server on stdio")
    return parser


def main(argv: list[str] | None = None):
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    # Configure logging
    log_level = logging.DEBUG if args.debug else logging.WARNING
    logging.basicConfig(
        level=log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    try:
        config = Config.from_args(
            hausdorff_threshold=args.hausdorff_threshold,
            max_iter=args.max_iter,
            tol=args.tol,
            operator=args.operator,
            max_response_size_kb=args.max_response_size,
        )
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        sys.exit(EXIT_INVALID)

    set_bruteforce_threshold(config.hausdorff_threshold)

    if args.command == "render":
        code = cmd_render(args.config, args.out, args.trace, config)
    elif args.command == "distance":
        code = cmd_distance(args.image_a, args.image_b, args.lo, args.hi, args.wrap)
    elif args.command == "approximate":
        code = cmd_approximate(args.image, args.epsilon, args.out, args.degree, config)
    elif args.command == "verify":
        code = cmd_verify(args.config, config, args.samples, args.seed)
    else:
        asyncio.run(run_server(config))
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
