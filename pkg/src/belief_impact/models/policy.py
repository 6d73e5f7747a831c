"""Network-administrator policy parameters and utility results."""

from __future__ import annotations

from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field


class PolicyConfig(BaseModel):
    """Authenticity-filter radius and utility weights.

    ``delta`` and ``alpha`` are reporting thresholds only; the optimiser
    maximises ``u1 + beta * u2``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    epsilon: float = Field(1.0, gt=0, description="Filter radius ε")
    beta: float = Field(1.6, ge=0, description="Weight of the permissiveness ratio")
    d_min: float = Field(1.1, gt=0, description="Minimum truth distance of a false source")
    delta: float = Field(0.0, ge=0, description="Separation threshold δ")
    alpha: float = Field(0.5, gt=0, le=1, description="Permissiveness threshold α")


@dataclass(frozen=True)
class UtilityBreakdown:
    """Unified utility ``total = u1 + β·u2`` at one filter radius."""

    epsilon: float
    u1: float
    u2: float
    total: float
    samples_used: int
    u1_std_error: float
    u1_pass_delta: bool
    u2_pass_alpha: bool
