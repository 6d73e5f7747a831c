"""Regenerate every reference figure from config/reference_setup.toml.

    uv run python reproduce_figures.py [--config PATH] [--out DIR] [--quick]

Writes one sweep per audience plus the utility curve and ε* summary.
"""

import argparse
import logging
import sys
from pathlib import Path

from belief_impact.cli.commands import cmd_optimize_policy, cmd_sweep
from belief_impact.cli.main import LOG_FORMAT
from belief_impact.config import load_run_config
from belief_impact.models.scenario import Audience

logger = logging.getLogger("reproduce_figures")

DEFAULT_CONFIG = Path(__file__).parent / "config" / "reference_setup.toml"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path, default=DEFAULT_CONFIG)
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--quick", action="store_true", help="200 draws instead of the configured count")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, stream=sys.stderr)

    sizes = {"n_draws": 200, "n_samples": 200} if args.quick else {}

    # ── Convergence sweeps, one directory per audience ───
    for audience in Audience:
        config = load_run_config(args.config, output_dir=args.out / f"sweep_{audience}", emit_svg=True, **sizes)
        config = config.model_copy(update={"scenario": config.scenario.model_copy(update={"audience": audience})})
        logger.info("Sweep for the %s audience → %s", audience, config.output_dir)
        cmd_sweep(config)

    # ── Utility trade-off and ε* ─────────────────────────
    config = load_run_config(args.config, output_dir=args.out / "policy", emit_svg=True, **sizes)
    logger.info("Policy optimisation → %s", config.output_dir)
    return cmd_optimize_policy(config)


if __name__ == "__main__":
    raise SystemExit(main())
