"""Simulation scenarios, scenario draws and convergence curves."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property

import numpy as np

from belief_impact.errors import DimensionMismatchError, InvalidModelError
from belief_impact.models.viewer import MATRIX_TOL, Covariance, Population


class Audience(StrEnum):
    """How the mean belief μ̄ relates to the truth and the source."""

    INDIFFERENT = "indifferent"
    UNEDUCATED = "uneducated"  # ‖μ̄ − x_s‖ ≤ ‖μ̄ − x_t‖
    EDUCATED = "educated"  # ‖μ̄ − x_s‖ ≥ ‖μ̄ − x_t‖


@dataclass(frozen=True, eq=False)
class ScenarioSpec:
    """Distribution of truth, source and audience for Monte Carlo runs.

    ``mu_spread`` is the covariance of the viewers' prior means around μ̄
    and may be singular (the zero matrix pins every μᵢ to μ̄).
    ``heterogeneity`` > 0 scales each viewer's covariances by independent
    log-normal factors, giving a non-ergodic audience.
    ``source_is_truth`` forces x_s = x_t on every draw.
    """

    dim: int
    sigma: Covariance
    sigma_s: Covariance
    mu_spread: np.ndarray
    n_viewers: int
    audience: Audience = Audience.INDIFFERENT
    d_min: float = 0.0
    heterogeneity: float = 0.0
    source_is_truth: bool = False

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidModelError("dim must be at least 1")
        if self.n_viewers < 1:
            raise InvalidModelError("n_viewers must be at least 1")
        if self.sigma.dim != self.dim or self.sigma_s.dim != self.dim:
            raise DimensionMismatchError(f"sigma and sigma_s must be {self.dim}x{self.dim}")
        spread = np.array(self.mu_spread, dtype=float)
        if spread.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"mu_spread must be {self.dim}x{self.dim}")
        if np.max(np.abs(spread - spread.T)) > MATRIX_TOL:
            raise InvalidModelError("mu_spread is not symmetric")
        if np.linalg.eigvalsh(spread).min() < -MATRIX_TOL:
            raise InvalidModelError("mu_spread is not positive-semidefinite")
        if self.d_min < 0 or self.heterogeneity < 0:
            raise InvalidModelError("d_min and heterogeneity must be non-negative")
        spread.setflags(write=False)
        object.__setattr__(self, "mu_spread", spread)
        object.__setattr__(self, "audience", Audience(self.audience))

    @cached_property
    def spread_root(self) -> np.ndarray:
        """Square root ``R`` with ``R Rᵀ = mu_spread`` (exact zeros for a zero spread)."""
        eigvals, eigvecs = np.linalg.eigh(self.mu_spread)
        root = eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))
        root.setflags(write=False)
        return root

    @classmethod
    def reference_setup(cls, **overrides) -> ScenarioSpec:
        """Σ = I₂, Σ_s = 0.5·I₂, μᵢ ~ N(μ̄, 0.1·I₂), 500 viewers."""
        params = dict(
            dim=2,
            sigma=Covariance.identity(2),
            sigma_s=Covariance.identity(2, 0.5),
            mu_spread=0.1 * np.eye(2),
            n_viewers=500,
            d_min=1.1,
        )
        params.update(overrides)
        return cls(**params)


@dataclass(frozen=True, eq=False)
class ScenarioDraw:
    """One sampled truth, source, mean belief and audience."""

    x_t: np.ndarray
    x_s: np.ndarray
    mu_bar: np.ndarray
    population: Population


@dataclass(frozen=True)
class ConvergenceCurve:
    """Per-ε statistics of c(x_t, ε) (true) and c(x_s, ε) (false) across draws."""

    epsilons: list[float]
    true_mean: list[float]
    true_std: list[float]
    false_mean: list[float]
    false_std: list[float]
    n_draws: int = field(default=0)

    def __post_init__(self) -> None:
        lengths = {
            len(self.epsilons),
            len(self.true_mean),
            len(self.true_std),
            len(self.false_mean),
            len(self.false_std),
        }
        if len(lengths) != 1:
            raise InvalidModelError("convergence curve columns differ in length")
