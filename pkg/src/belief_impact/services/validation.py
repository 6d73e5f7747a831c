"""Oracle validation: cross-checks the closed-form reporter by brute force."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from belief_impact.errors import InvalidModelError
from belief_impact.models.report import OracleMethod, OracleResult, ReportDesign, ReporterMoments
from belief_impact.models.viewer import Population
from belief_impact.oracles.base import BaseOracle
from belief_impact.oracles.descent import ProjectedDescentOracle
from belief_impact.oracles.grid import GridOracle
from belief_impact.services.belief_core import as_vec, build_profile
from belief_impact.services.reporter import optimal_report, population_moments
from belief_impact.services.sampling import draw_stream, sample_unit_sphere

logger = logging.getLogger(__name__)

DesignFn = Callable[[ReporterMoments, np.ndarray, np.ndarray, float], ReportDesign]

# Relative slack on the ball radius when checking that a report is feasible.
FEASIBILITY_RTOL = 1e-9


def make_oracle(method: OracleMethod | str, resolution: float = 1e-3) -> BaseOracle:
    """Pick the oracle implementation for *method*."""
    method = OracleMethod(method)
    if method is OracleMethod.GRID:
        return GridOracle(resolution=resolution)
    return ProjectedDescentOracle()


def brute_force_report(
    pop: Population,
    x_s: ArrayLike,
    x_t: ArrayLike,
    epsilon: float,
    resolution: float = 1e-3,
    method: OracleMethod | str = OracleMethod.GRID,
) -> OracleResult:
    """Best feasible report for *pop* found without the closed form."""
    x_s = as_vec(x_s, pop.dim, "x_s")
    x_t = as_vec(x_t, pop.dim, "x_t")
    if not epsilon > 0:
        raise InvalidModelError(f"epsilon must be positive, got {epsilon}")
    oracle = make_oracle(method, resolution)
    return oracle.solve(population_moments(pop), x_s, x_t, epsilon)


def compare(
    design: ReportDesign,
    oracle: OracleResult,
    tol: float,
    x_t: ArrayLike | None = None,
) -> bool:
    """Whether the closed-form design and the oracle agree on the objective.

    An oracle far below the design flags an optimiser bug.  With *x_t*
    given, both reports must also lie in the design's ε-ball; an
    objective reached outside the ball is not comparable.
    """
    if not (math.isfinite(design.objective) and math.isfinite(oracle.objective)):
        return False
    if x_t is not None and not (
        _within_ball(design.y_star, x_t, design.epsilon)
        and _within_ball(oracle.y_best, x_t, design.epsilon)
    ):
        return False
    return abs(design.objective - oracle.objective) <= tol


def _within_ball(y: np.ndarray, x_t: ArrayLike, epsilon: float) -> bool:
    if math.isinf(epsilon):
        return True
    dist = float(np.linalg.norm(np.asarray(y, dtype=float) - as_vec(x_t, len(y), "x_t")))
    return dist <= epsilon * (1.0 + FEASIBILITY_RTOL)


# ── Random instances ─────────────────────────────────────


@dataclass(frozen=True, eq=False)
class ValidationInstance:
    """A random reporter problem, serialisable for replay."""

    index: int
    x_s: np.ndarray
    x_t: np.ndarray
    epsilon: float
    means: np.ndarray
    sigmas: np.ndarray
    sigmas_s: np.ndarray

    def population(self) -> Population:
        return Population.from_profiles(
            [
                build_profile(mu, sigma, sigma_s)
                for mu, sigma, sigma_s in zip(self.means, self.sigmas, self.sigmas_s, strict=True)
            ]
        )

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "x_s": self.x_s.tolist(),
            "x_t": self.x_t.tolist(),
            "epsilon": self.epsilon,
            "means": self.means.tolist(),
            "sigmas": self.sigmas.tolist(),
            "sigmas_s": self.sigmas_s.tolist(),
        }


def random_spd(rng: np.random.Generator, dim: int, low: float = 0.2, high: float = 3.0) -> np.ndarray:
    """Random rotation of a diagonal matrix with eigenvalues in ``[low, high]``."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    matrix = q @ np.diag(rng.uniform(low, high, dim)) @ q.T
    return 0.5 * (matrix + matrix.T)


def random_instance(seed: int, index: int, dim: int = 2, n_viewers: int = 5) -> ValidationInstance:
    rng = draw_stream(seed, index)
    mu_bar = sample_unit_sphere(rng, dim)
    return ValidationInstance(
        index=index,
        x_s=sample_unit_sphere(rng, dim),
        x_t=sample_unit_sphere(rng, dim),
        epsilon=float(rng.uniform(0.1, 2.0)),
        means=mu_bar + math.sqrt(0.1) * rng.standard_normal((n_viewers, dim)),
        sigmas=np.stack([random_spd(rng, dim) for _ in range(n_viewers)]),
        sigmas_s=np.stack([random_spd(rng, dim) for _ in range(n_viewers)]),
    )


@dataclass(frozen=True)
class ValidationRow:
    instance: ValidationInstance
    design: ReportDesign
    grid: OracleResult
    descent: OracleResult
    passed: bool


@dataclass
class ValidationReport:
    rows: list[ValidationRow] = field(default_factory=list)

    @property
    def failures(self) -> list[ValidationRow]:
        return [row for row in self.rows if not row.passed]

    @property
    def all_passed(self) -> bool:
        return not self.failures


def run_validation(
    n_instances: int,
    seed: int,
    *,
    dim: int = 2,
    resolution: float = 1e-3,
    tol: float = 1e-3,
    design_fn: DesignFn = optimal_report,
) -> ValidationReport:
    """Compare *design_fn* with both oracles on ``n_instances`` random problems."""
    if n_instances < 0:
        raise InvalidModelError("n_instances must be non-negative")
    grid_oracle = make_oracle(OracleMethod.GRID, resolution)
    descent_oracle = make_oracle(OracleMethod.PROJECTED_DESCENT)

    report = ValidationReport()
    for index in range(n_instances):
        instance = random_instance(seed, index, dim)
        moments = population_moments(instance.population())
        design = design_fn(moments, instance.x_s, instance.x_t, instance.epsilon)
        grid = grid_oracle.solve(moments, instance.x_s, instance.x_t, instance.epsilon)
        descent = descent_oracle.solve(moments, instance.x_s, instance.x_t, instance.epsilon)
        passed = (
            compare(design, grid, tol, instance.x_t)
            and abs(grid.objective - descent.objective) <= tol
        )
        if not passed:
            logger.error(
                "Instance %d failed: design=%.6g grid=%.6g descent=%.6g",
                index,
                design.objective,
                grid.objective,
                descent.objective,
            )
        report.rows.append(
            ValidationRow(instance=instance, design=design, grid=grid, descent=descent, passed=passed)
        )
    logger.info("Validation: %d/%d instances passed", len(report.rows) - len(report.failures), len(report.rows))
    return report
