"""Result documents and tabular writers for the CLI."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

import pandas as pd
from pydantic import BaseModel, ConfigDict, RootModel

from belief_impact.models.policy import UtilityBreakdown
from belief_impact.models.report import ReportComponents
from belief_impact.models.scenario import ConvergenceCurve
from belief_impact.services.validation import ValidationInstance

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.8e"

SWEEP_COLUMNS = ["epsilon", "true_mean", "true_std", "false_mean", "false_std"]
UTILITY_COLUMNS = ["epsilon", "u1", "u2", "total", "u1_pass_delta", "u2_pass_alpha"]


# ── Documents ────────────────────────────────────────────


class ComponentsDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    truth: list[float]
    source: list[float]
    prior_offset: list[float]

    @classmethod
    def from_components(cls, components: ReportComponents) -> ComponentsDocument:
        return cls(
            truth=components.truth.tolist(),
            source=components.source.tolist(),
            prior_offset=components.prior_offset.tolist(),
        )


class DesignReportDocument(BaseModel):
    """Output of ``design-report``."""

    model_config = ConfigDict(extra="forbid")

    y_star: list[float]
    lambda_star: float
    binding: bool
    objective: float
    admissible: bool
    epsilon: float
    exaggeration: list[float]
    components: ComponentsDocument


class PolicySummaryDocument(BaseModel):
    """``summary.json`` written by ``optimize-policy``."""

    model_config = ConfigDict(extra="forbid")

    epsilon_star: float
    total_at_star: float
    beta: float
    d_min: float
    n_samples: int
    seed: int
    audience: str


class ValidationFailureDocument(BaseModel):
    """One failing ``validate`` instance, enough to rebuild the problem."""

    model_config = ConfigDict(extra="forbid")

    index: int
    x_s: list[float]
    x_t: list[float]
    epsilon: float
    means: list[list[float]]
    sigmas: list[list[list[float]]]
    sigmas_s: list[list[list[float]]]

    @classmethod
    def from_instance(cls, instance: ValidationInstance) -> ValidationFailureDocument:
        return cls.model_validate(instance.to_dict())


class ValidationFailuresDocument(RootModel[list[ValidationFailureDocument]]):
    """``validate_failures.json``: a list of replayable instances."""


# ── Writers ──────────────────────────────────────────────


def sweep_frame(curve: ConvergenceCurve) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "epsilon": curve.epsilons,
            "true_mean": curve.true_mean,
            "true_std": curve.true_std,
            "false_mean": curve.false_mean,
            "false_std": curve.false_std,
        },
        columns=SWEEP_COLUMNS,
    )


def utility_frame(curve: Sequence[UtilityBreakdown]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "epsilon": [p.epsilon for p in curve],
            "u1": [p.u1 for p in curve],
            "u2": [p.u2 for p in curve],
            "total": [p.total for p in curve],
            "u1_pass_delta": [p.u1_pass_delta for p in curve],
            "u2_pass_alpha": [p.u2_pass_alpha for p in curve],
        },
        columns=UTILITY_COLUMNS,
    )


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    """Write *frame* with a fixed float format so reruns are byte-identical."""
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("Wrote %s (%d rows)", path, len(frame))
    return path


def write_json(document: BaseModel, path: Path) -> Path:
    path.write_text(document.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)
    return path

