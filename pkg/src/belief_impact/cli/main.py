"""``belief-impact`` command line."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Sequence

from belief_impact import __version__
from belief_impact.cli.commands import (
    EXIT_BAD_INPUT,
    EXIT_FAILED,
    cmd_design_report,
    cmd_optimize_policy,
    cmd_sweep,
    cmd_validate,
)
from belief_impact.config import load_run_config
from belief_impact.errors import BeliefImpactError, ConvergenceError, InvalidModelError

logger = logging.getLogger("belief_impact.cli")

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _parse_vector(text: str | None, name: str) -> list[float] | None:
    """``"1,0"`` → ``[1.0, 0.0]``; errors name the offending flag."""
    if text is None:
        return None
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise InvalidModelError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in values):
        raise InvalidModelError(f"{name}: values must be finite, got {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--out", dest="output_dir", help="output directory")
    common.add_argument("--svg", dest="emit_svg", action="store_true", default=None, help="also write SVG figures")
    common.add_argument(
        "--log-level", type=str.upper, choices=LOG_LEVELS, help="logging threshold (default INFO)"
    )

    parser = argparse.ArgumentParser(
        prog="belief-impact",
        description="Optimal reports and authenticity-filter tuning for Gaussian audiences.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    design = sub.add_parser("design-report", parents=[common], help="optimal report for one source")
    design.add_argument("--x-s", required=True, help="source belief, e.g. 1,0 (use --x-s=-1,0 for negatives)")
    design.add_argument("--x-t", required=True, help="truth, e.g. 1,0")
    design.add_argument("--epsilon", required=True, help="filter radius (positive, finite)")
    design.add_argument("--mu-bar", help="audience mean prior (defaults to the origin)")

    sub.add_parser("sweep", parents=[common], help="true/false convergence across the ε grid")
    sub.add_parser("optimize-policy", parents=[common], help="choose ε by the unified utility")

    validate = sub.add_parser("validate", parents=[common], help="cross-check against brute-force oracles")
    validate.add_argument("--instances", type=int, default=100, help="random instances to check")
    validate.add_argument("--resolution", type=float, default=1e-3, help="grid oracle spacing")
    validate.add_argument("--tol", type=float, default=1e-3, help="objective tolerance")
    return parser


def _parse_epsilon(text: str) -> float:
    try:
        epsilon = float(text)
    except ValueError:
        raise InvalidModelError(f"epsilon: expected a number, got {text!r}") from None
    if not (math.isfinite(epsilon) and epsilon > 0):
        raise InvalidModelError(f"epsilon: must be positive and finite, got {text!r}")
    return epsilon


def _run(args: argparse.Namespace) -> int:
    config = load_run_config(
        args.config,
        seed=args.seed,
        output_dir=args.output_dir,
        emit_svg=args.emit_svg,
        log_level=args.log_level,
    )
    logging.getLogger().setLevel(config.log_level)
    logger.debug("Resolved configuration: %s", config.model_dump_json())

    if args.command == "design-report":
        return cmd_design_report(
            config,
            _parse_vector(args.x_s, "x_s"),
            _parse_vector(args.x_t, "x_t"),
            _parse_epsilon(args.epsilon),
            _parse_vector(args.mu_bar, "mu_bar"),
        )
    if args.command == "sweep":
        return cmd_sweep(config)
    if args.command == "optimize-policy":
        return cmd_optimize_policy(config)
    return cmd_validate(config, args.instances, resolution=args.resolution, tol=args.tol)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or "INFO").upper(),
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    try:
        return _run(args)
    except ConvergenceError as exc:
        logger.error("Numerical failure: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (BeliefImpactError, ValueError, OSError) as exc:
        # pydantic.ValidationError and tomllib.TOMLDecodeError are ValueErrors.
        logger.error("Bad input: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
