"""Deterministic SVG figures for sweeps and utility curves."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from belief_impact.models.policy import UtilityBreakdown  # noqa: E402
from belief_impact.models.scenario import ConvergenceCurve  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed salt and no timestamp keep the SVG bytes stable across runs.
plt.rcParams["svg.hashsalt"] = "belief-impact"
_SVG_METADATA = {"Date": None}

TRUE_COLOR = "tab:blue"
FALSE_COLOR = "tab:red"


def _save(fig: plt.Figure, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)
    logger.info("Wrote %s", path)
    return path


def plot_sweep(curve: ConvergenceCurve, path: Path, title: str | None = None) -> Path:
    """Mean convergence of true and false sources with ±1σ bands."""
    eps = np.asarray(curve.epsilons)
    fig, ax = plt.subplots(figsize=(6, 4))
    for mean, std, color, label in (
        (curve.true_mean, curve.true_std, TRUE_COLOR, "true source"),
        (curve.false_mean, curve.false_std, FALSE_COLOR, "false source"),
    ):
        mean, std = np.asarray(mean), np.asarray(std)
        ax.plot(eps, mean, color=color, label=label)
        ax.fill_between(eps, mean - std, mean + std, color=color, alpha=0.2, linewidth=0)
    ax.set_xlabel("filter radius ε")
    ax.set_ylabel("mean convergence distance")
    if title:
        ax.set_title(title)
    ax.legend()
    return _save(fig, path)


def plot_utility(curve: Sequence[UtilityBreakdown], epsilon_star: float, path: Path) -> Path:
    """U1, β·U2 and their sum, with ε* marked."""
    eps = np.array([p.epsilon for p in curve])
    u1 = np.array([p.u1 for p in curve])
    total = np.array([p.total for p in curve])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(eps, u1, color=FALSE_COLOR, label="U1 (separation)")
    ax.plot(eps, total - u1, color=TRUE_COLOR, label="β·U2 (permissiveness)")
    ax.plot(eps, total, color="black", label="U")
    ax.axvline(epsilon_star, color="grey", linestyle="--", linewidth=1)
    ax.set_xlabel("filter radius ε")
    ax.set_ylabel("utility")
    ax.legend()
    return _save(fig, path)
