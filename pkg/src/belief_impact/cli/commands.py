"""Command implementations; each returns a process exit code."""

from __future__ import annotations

import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from belief_impact.cli.output import (
    ComponentsDocument,
    DesignReportDocument,
    PolicySummaryDocument,
    ValidationFailureDocument,
    ValidationFailuresDocument,
    sweep_frame,
    utility_frame,
    write_csv,
    write_json,
)
from belief_impact.config import RunConfig
from belief_impact.models.scenario import Audience
from belief_impact.services.belief_core import as_vec
from belief_impact.services.policy import is_admissible, optimize_policy
from belief_impact.services.reporter import (
    ergodic_moments,
    exaggeration,
    optimal_report,
    report_components,
)
from belief_impact.services.simulation import sweep_epsilon
from belief_impact.services.validation import DesignFn, ValidationReport, run_validation

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2

FAILURES_FILE = "validate_failures.json"


def _output_dir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ── design-report ────────────────────────────────────────


def cmd_design_report(
    config: RunConfig,
    x_s: Sequence[float],
    x_t: Sequence[float],
    epsilon: float,
    mu_bar: Sequence[float] | None = None,
) -> int:
    """Print the optimal filtered report for the configured ergodic audience."""
    scenario = config.scenario_spec()
    dim = scenario.dim
    x_s = as_vec(x_s, dim, "x_s")
    x_t = as_vec(x_t, dim, "x_t")
    mu_bar = np.zeros(dim) if mu_bar is None else as_vec(mu_bar, dim, "mu_bar")
    if scenario.heterogeneity > 0:
        logger.warning("design-report uses the ergodic audience; heterogeneity is ignored")

    moments = ergodic_moments(scenario.sigma, scenario.sigma_s, mu_bar, scenario.mu_spread)
    design = optimal_report(moments, x_s, x_t, epsilon)
    components = report_components(moments, x_s, x_t, design.lambda_star)
    document = DesignReportDocument(
        y_star=design.y_star.tolist(),
        lambda_star=design.lambda_star,
        binding=design.binding,
        objective=design.objective,
        admissible=is_admissible(design.y_star, x_t, epsilon),
        epsilon=epsilon,
        exaggeration=exaggeration(scenario.sigma, scenario.sigma_s, mu_bar, x_s).tolist(),
        components=ComponentsDocument.from_components(components),
    )
    print(document.model_dump_json(indent=2))
    return EXIT_OK


# ── sweep ────────────────────────────────────────────────


def cmd_sweep(config: RunConfig) -> int:
    """Write ``sweep.csv`` (and ``sweep.svg``) for the configured audience."""
    seed = config.require_seed()
    out = _output_dir(config)
    curve = sweep_epsilon(config.scenario_spec(), config.epsilon_grid.values(), config.n_draws, seed)
    write_csv(sweep_frame(curve), out / "sweep.csv")
    if config.emit_svg:
        from belief_impact.cli.plots import plot_sweep

        plot_sweep(curve, out / "sweep.svg", title=f"{config.scenario.audience} audience")
    return EXIT_OK


# ── optimize-policy ──────────────────────────────────────


def cmd_optimize_policy(config: RunConfig) -> int:
    """Write ``utility.csv`` and ``summary.json``; print the summary."""
    seed = config.require_seed()
    out = _output_dir(config)
    epsilon_star, curve = optimize_policy(
        config.scenario_spec(),
        config.policy,
        config.epsilon_grid.values(),
        config.n_samples,
        seed,
    )
    write_csv(utility_frame(curve), out / "utility.csv")
    best = next(point for point in curve if point.epsilon == epsilon_star)
    summary = PolicySummaryDocument(
        epsilon_star=epsilon_star,
        total_at_star=best.total,
        beta=config.policy.beta,
        d_min=config.policy.d_min,
        n_samples=config.n_samples,
        seed=seed,
        audience=Audience(config.scenario.audience).value,
    )
    write_json(summary, out / "summary.json")
    if config.emit_svg:
        from belief_impact.cli.plots import plot_utility

        plot_utility(curve, epsilon_star, out / "utility.svg")
    print(summary.model_dump_json(indent=2))
    return EXIT_OK


# ── validate ─────────────────────────────────────────────


def _print_table(report: ValidationReport) -> None:
    print(f"{'index':>5}  {'epsilon':>8}  {'design':>12}  {'grid':>12}  {'descent':>12}  status")
    for row in report.rows:
        status = "pass" if row.passed else "FAIL"
        print(
            f"{row.instance.index:>5}  {row.instance.epsilon:>8.4f}  {row.design.objective:>12.6g}  "
            f"{row.grid.objective:>12.6g}  {row.descent.objective:>12.6g}  {status}"
        )
    print(f"{len(report.rows) - len(report.failures)}/{len(report.rows)} passed")


def cmd_validate(
    config: RunConfig,
    n_instances: int,
    *,
    resolution: float = 1e-3,
    tol: float = 1e-3,
    design_fn: DesignFn = optimal_report,
) -> int:
    """Cross-check the closed-form reporter; exit 1 and dump failures on mismatch."""
    seed = config.require_seed()
    report = run_validation(
        n_instances,
        seed,
        dim=config.scenario.dim,
        resolution=resolution,
        tol=tol,
        design_fn=design_fn,
    )
    _print_table(report)
    if report.all_passed:
        return EXIT_OK

    failures = ValidationFailuresDocument(
        [ValidationFailureDocument.from_instance(row.instance) for row in report.failures]
    )
    path = write_json(failures, _output_dir(config) / FAILURES_FILE)
    print(f"{len(failures.root)} failing instance(s) written to {path}", file=sys.stderr)
    return EXIT_FAILED
