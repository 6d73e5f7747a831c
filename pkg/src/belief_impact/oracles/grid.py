"""Exhaustive lattice search over the ε-ball."""

from __future__ import annotations

import logging
import math

import numpy as np

from belief_impact.errors import InvalidModelError
from belief_impact.models.report import OracleMethod, OracleResult, ReporterMoments
from belief_impact.oracles.base import BaseOracle

logger = logging.getLogger(__name__)

MAX_GRID_DIM = 3


class GridOracle(BaseOracle):
    """Evaluates the objective on every lattice point inside the ball.

    The lattice has spacing ``resolution`` and is centred on ``x_t``, so
    ``x_t`` itself is always a candidate.  Rows along the first axis are
    processed one at a time to bound memory.
    """

    def __init__(self, resolution: float = 1e-3) -> None:
        if not resolution > 0:
            raise InvalidModelError(f"resolution must be positive, got {resolution}")
        self._resolution = resolution

    @property
    def method(self) -> OracleMethod:
        return OracleMethod.GRID

    def solve(
        self,
        moments: ReporterMoments,
        x_s: np.ndarray,
        x_t: np.ndarray,
        epsilon: float,
    ) -> OracleResult:
        n = moments.dim
        if n > MAX_GRID_DIM:
            raise InvalidModelError(f"grid oracle supports dim <= {MAX_GRID_DIM}, got {n}")
        if not math.isfinite(epsilon):
            raise InvalidModelError("grid oracle needs a finite epsilon")

        steps = int(math.ceil(epsilon / self._resolution))
        axis = np.arange(-steps, steps + 1) * self._resolution
        if n > 1:
            rest = np.stack(np.meshgrid(*([axis] * (n - 1)), indexing="ij"), axis=-1).reshape(-1, n - 1)
        else:
            rest = np.zeros((1, 0))
        rest_sq = np.einsum("ij,ij->i", rest, rest)
        radius_sq = epsilon * epsilon

        best_value = math.inf
        best_point = x_t.copy()
        evaluations = 0
        for first in axis:
            inside = rest_sq + first * first <= radius_sq
            if not inside.any():
                continue
            offsets = np.column_stack([np.full(int(inside.sum()), first), rest[inside]])
            values = moments.objective(x_t + offsets, x_s)
            evaluations += values.shape[0]
            k = int(np.argmin(values))
            if values[k] < best_value:
                best_value = float(values[k])
                best_point = x_t + offsets[k]

        logger.debug("Grid oracle evaluated %d points (resolution=%g)", evaluations, self._resolution)
        return OracleResult(
            y_best=best_point,
            objective=best_value,
            method=self.method,
            evaluations=evaluations,
        )
