"""Reporter-side value objects: population moments, designs, oracle results."""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from belief_impact.errors import DimensionMismatchError, InvalidModelError
from belief_impact.models.viewer import MATRIX_TOL


@dataclass(frozen=True, eq=False)
class ReporterMoments:
    """Belief-statistic moments known to the well-informed reporter.

    ``a2 = E AᵢᵀAᵢ``, ``abmu = E AᵢᵀBᵢμᵢ`` and ``at = E Aᵢᵀ`` drive the
    closed-form report.  ``bmu = E Bᵢμᵢ`` and ``b2mu = E μᵢᵀBᵢᵀBᵢμᵢ`` only
    enter the constant part of the objective.
    """

    a2: np.ndarray
    abmu: np.ndarray
    at: np.ndarray
    bmu: np.ndarray
    b2mu: float

    def __post_init__(self) -> None:
        n = self.abmu.shape[0]
        if self.a2.shape != (n, n) or self.at.shape != (n, n) or self.bmu.shape != (n,):
            raise DimensionMismatchError("reporter moments have inconsistent shapes")
        if np.max(np.abs(self.a2 - self.a2.T)) > MATRIX_TOL:
            raise InvalidModelError("a2 moment is not symmetric")
        if np.linalg.eigvalsh(self.a2).min() < -MATRIX_TOL:
            raise InvalidModelError("a2 moment is not positive-semidefinite")

    @property
    def dim(self) -> int:
        return self.abmu.shape[0]

    def objective(self, y: np.ndarray, x_s: np.ndarray) -> np.ndarray | float:
        """``E‖Aᵢy + Bᵢμᵢ − x_s‖²`` for one report or a stack of reports (last axis)."""
        y = np.asarray(y, dtype=float)
        quad = np.einsum("...i,ij,...j->...", y, self.a2, y)
        linear = 2.0 * (y @ (self.abmu - self.at @ x_s))
        constant = self.b2mu - 2.0 * float(x_s @ self.bmu) + float(x_s @ x_s)
        value = quad + linear + constant
        return float(value) if np.ndim(value) == 0 else value

    def gradient(
        self, y: np.ndarray, x_s: np.ndarray, x_t: np.ndarray, lam: float = 0.0
    ) -> np.ndarray:
        """Derivative of the Lagrangian ``E‖Aᵢy + Bᵢμᵢ − x_s‖² + λ‖y − x_t‖²``."""
        return 2.0 * ((self.a2 + lam * np.eye(self.dim)) @ y + self.abmu - self.at @ x_s - lam * x_t)


@dataclass(frozen=True, eq=False)
class ReportDesign:
    """Optimal report y*, its multiplier λ* and the squared objective at y*."""

    y_star: np.ndarray
    lambda_star: float
    objective: float
    binding: bool
    epsilon: float

    def __post_init__(self) -> None:
        if self.lambda_star < 0:
            raise InvalidModelError("lambda_star must be non-negative")
        if not self.binding and self.lambda_star != 0.0:
            raise InvalidModelError("a non-binding design must have lambda_star == 0")


@dataclass(frozen=True, eq=False)
class ReportComponents:
    """Linear split of y*(λ) into truth, source and prior-offset parts."""

    truth: np.ndarray
    source: np.ndarray
    prior_offset: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.truth + self.source + self.prior_offset


class OracleMethod(StrEnum):
    GRID = "grid"
    PROJECTED_DESCENT = "projected_descent"


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Best feasible report found by a brute-force solver."""

    y_best: np.ndarray
    objective: float
    method: OracleMethod
    evaluations: int
