"""Projected gradient descent on the ε-ball."""

from __future__ import annotations

import logging

import numpy as np

from belief_impact.models.report import OracleMethod, OracleResult, ReporterMoments
from belief_impact.oracles.base import BaseOracle
from belief_impact.services.reporter import project_onto_ball

logger = logging.getLogger(__name__)


class ProjectedDescentOracle(BaseOracle):
    """Fixed-step gradient steps on the unconstrained objective, each
    followed by Euclidean projection back onto the ball.  Starts at ``x_t``.
    """

    def __init__(self, step: float = 0.05, iterations: int = 10_000) -> None:
        self._step = step
        self._iterations = iterations

    @property
    def method(self) -> OracleMethod:
        return OracleMethod.PROJECTED_DESCENT

    def solve(
        self,
        moments: ReporterMoments,
        x_s: np.ndarray,
        x_t: np.ndarray,
        epsilon: float,
    ) -> OracleResult:
        y = x_t.copy()
        for _ in range(self._iterations):
            y = project_onto_ball(y - self._step * moments.gradient(y, x_s, x_t), x_t, epsilon)
        value = moments.objective(y, x_s)
        logger.debug("Projected descent finished at objective %.10g", value)
        return OracleResult(
            y_best=y,
            objective=value,
            method=self.method,
            evaluations=self._iterations,
        )
