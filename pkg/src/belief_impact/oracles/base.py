"""Base oracle: abstract interface every brute-force solver implements."""

from abc import ABC, abstractmethod

import numpy as np

from belief_impact.models.report import OracleMethod, OracleResult, ReporterMoments


class BaseOracle(ABC):
    """Abstract base class for independent solvers of the filtered report problem.

    Every oracle minimises ``E‖Aᵢy + Bᵢμᵢ − x_s‖²`` over the ball
    ``‖y − x_t‖ ≤ ε`` without using the multiplier characterisation of the
    optimum, so it can vouch for the closed-form reporter.
    """

    @property
    @abstractmethod
    def method(self) -> OracleMethod:
        """Which search strategy this oracle uses (reported in results)."""

    @abstractmethod
    def solve(
        self,
        moments: ReporterMoments,
        x_s: np.ndarray,
        x_t: np.ndarray,
        epsilon: float,
    ) -> OracleResult:
        """Search for the best feasible report.

        Parameters
        ----------
        moments:
            Population moments defining the objective and its gradient.
        x_s, x_t:
            Source information and truth.
        epsilon:
            Filter radius.
        """
