"""Network administrator: the authenticity filter and the choice of ε.

``c(x, ε)`` is the mean convergence distance achieved by the optimal
reporter conveying ``x`` through a filter of radius ε around the truth.
The administrator trades

* ``U1(ε) = E[c(x_s, ε) − c(x_t, ε) | ‖x_t − x_s‖ ≥ d_min]`` (false sources
  should converge worse than true ones) against
* ``U2(ε) = E c(x_t, ∞) / E c(x_t, ε)`` (the truth should not be hampered),

and picks ``ε* = argmax U1 + β·U2``.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from belief_impact.errors import DegeneratePopulationError, InfeasibleSamplingError, InvalidModelError
from belief_impact.models.policy import PolicyConfig, UtilityBreakdown
from belief_impact.models.report import ReporterMoments
from belief_impact.models.scenario import ScenarioDraw, ScenarioSpec
from belief_impact.models.viewer import Population
from belief_impact.services.belief_core import as_vec, population_conveyance
from belief_impact.services.reporter import optimal_report, population_moments
from belief_impact.services.sampling import acceptance_rate, draw_stream, sample_scenario

logger = logging.getLogger(__name__)

MIN_ACCEPTANCE = 1e-4
# Denominators of the permissiveness ratio at or below this are treated as zero.
ZERO_CONVERGENCE = 1e-12
# Thresholds used when a utility is requested without a PolicyConfig.
_REPORTING_DEFAULTS = PolicyConfig()


def is_admissible(y: ArrayLike, x_t: ArrayLike, epsilon: float) -> bool:
    """Whether report *y* passes the closed ε-ball filter around *x_t*."""
    x_t = as_vec(x_t, name="x_t")
    y = as_vec(y, x_t.shape[0], "y")
    return bool(np.linalg.norm(y - x_t) <= epsilon)


def convergence_stat(
    pop: Population,
    x_s: ArrayLike,
    x_t: ArrayLike,
    epsilon: float,
    moments: ReporterMoments | None = None,
) -> tuple[float, float]:
    """Mean and spread of ``‖x_s − ζᵢ(y*)‖`` under the optimal filtered report.

    ``epsilon = math.inf`` means no filter.  Pass precomputed *moments*
    when evaluating many ε on one population.
    """
    m = moments if moments is not None else population_moments(pop)
    design = optimal_report(m, x_s, x_t, epsilon)
    return population_conveyance(pop, x_s, design.y_star)


def check_epsilon_grid(grid: Sequence[float]) -> list[float]:
    """Validate a non-empty, strictly increasing grid of positive radii."""
    values = [float(e) for e in grid]
    if not values:
        raise InvalidModelError("epsilon grid is empty")
    if any(not e > 0 for e in values):
        raise InvalidModelError("epsilon grid values must be positive")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidModelError("epsilon grid must be strictly increasing")
    return values


# ── Monte Carlo samples ──────────────────────────────────


@dataclass(frozen=True, eq=False)
class PolicySample:
    """One conditioned draw with everything reused across ε."""

    draw: ScenarioDraw
    moments: ReporterMoments
    free_truth: float  # c(x_t, ∞)

    def truth_convergence(self, epsilon: float) -> float:
        if math.isinf(epsilon):
            return self.free_truth
        d = self.draw
        return convergence_stat(d.population, d.x_t, d.x_t, epsilon, self.moments)[0]

    def source_convergence(self, epsilon: float) -> float:
        d = self.draw
        return convergence_stat(d.population, d.x_s, d.x_t, epsilon, self.moments)[0]


def sample_policy_draws(env: ScenarioSpec, n_samples: int, rng_seed: int) -> list[PolicySample]:
    """Draws with ``‖x_t − x_s‖ ≥ env.d_min``, shared by every ε (common random numbers)."""
    if n_samples < 1:
        raise InvalidModelError("n_samples must be at least 1")
    rate = acceptance_rate(env, env.d_min, rng_seed)
    if rate < MIN_ACCEPTANCE:
        raise InfeasibleSamplingError(
            f"acceptance rate {rate:.2e} for d_min={env.d_min} is below {MIN_ACCEPTANCE:g}; "
            "no false source can be that far from the truth"
        )
    if rate < 0.05:
        logger.warning("Low rejection-sampling acceptance rate %.3g for d_min=%g", rate, env.d_min)

    samples = []
    for index in range(n_samples):
        draw = sample_scenario(draw_stream(rng_seed, index), env, min_separation=env.d_min)
        moments = population_moments(draw.population)
        free_truth = convergence_stat(draw.population, draw.x_t, draw.x_t, math.inf, moments)[0]
        samples.append(PolicySample(draw=draw, moments=moments, free_truth=free_truth))
    return samples


def _evaluate(samples: Sequence[PolicySample], cfg: PolicyConfig, epsilon: float) -> UtilityBreakdown:
    truth = np.array([s.truth_convergence(epsilon) for s in samples])
    source = np.array([s.source_convergence(epsilon) for s in samples])
    gaps = source - truth
    u1 = float(gaps.mean())
    u1_se = float(gaps.std(ddof=1) / math.sqrt(len(gaps))) if len(gaps) > 1 else 0.0

    denominator = float(truth.mean())
    if denominator <= ZERO_CONVERGENCE:
        raise DegeneratePopulationError(
            f"mean truth convergence at epsilon={epsilon} is {denominator:.3e}; "
            "the permissiveness ratio is undefined for a zero-variance audience"
        )
    u2 = float(np.mean([s.free_truth for s in samples])) / denominator
    return UtilityBreakdown(
        epsilon=epsilon,
        u1=u1,
        u2=u2,
        total=u1 + cfg.beta * u2,
        samples_used=len(samples),
        u1_std_error=u1_se,
        u1_pass_delta=u1 >= cfg.delta,
        u2_pass_alpha=u2 >= cfg.alpha,
    )


# ── Utilities ────────────────────────────────────────────


def utility_separation(env: ScenarioSpec, epsilon: float, n_samples: int, rng_seed: int) -> float:
    """Monte Carlo estimate of U1(ε)."""
    samples = sample_policy_draws(env, n_samples, rng_seed)
    return _evaluate(samples, _REPORTING_DEFAULTS, epsilon).u1


def utility_permissiveness(env: ScenarioSpec, epsilon: float, n_samples: int, rng_seed: int) -> float:
    """Monte Carlo estimate of U2(ε), a ratio of means on shared samples."""
    samples = sample_policy_draws(env, n_samples, rng_seed)
    return _evaluate(samples, _REPORTING_DEFAULTS, epsilon).u2


def unified_utility(
    env: ScenarioSpec, cfg: PolicyConfig, n_samples: int, rng_seed: int
) -> UtilityBreakdown:
    """``U(ε) = U1(ε) + β·U2(ε)`` at ``cfg.epsilon``, conditioned on ``cfg.d_min``."""
    env = dataclasses.replace(env, d_min=cfg.d_min)
    samples = sample_policy_draws(env, n_samples, rng_seed)
    return _evaluate(samples, cfg, cfg.epsilon)


def utility_curve(
    samples: Sequence[PolicySample], cfg: PolicyConfig, epsilon_grid: Sequence[float]
) -> list[UtilityBreakdown]:
    curve = []
    for epsilon in check_epsilon_grid(epsilon_grid):
        point = _evaluate(samples, cfg, epsilon)
        logger.debug("epsilon=%g u1=%.6g u2=%.6g total=%.6g", epsilon, point.u1, point.u2, point.total)
        curve.append(point)
    return curve


def optimize_policy(
    env: ScenarioSpec,
    cfg: PolicyConfig,
    epsilon_grid: Sequence[float],
    n_samples: int,
    rng_seed: int,
) -> tuple[float, list[UtilityBreakdown]]:
    """Grid maximiser ε* of the unified utility (ties go to the smallest ε)."""
    grid = check_epsilon_grid(epsilon_grid)
    env = dataclasses.replace(env, d_min=cfg.d_min)
    samples = sample_policy_draws(env, n_samples, rng_seed)
    curve = utility_curve(samples, cfg, grid)
    # argmax returns the first maximum, i.e. the smallest ε on an increasing grid.
    best = int(np.argmax([point.total for point in curve]))
    logger.info("epsilon*=%g with U=%.6g over %d grid points", grid[best], curve[best].total, len(grid))
    return grid[best], curve
