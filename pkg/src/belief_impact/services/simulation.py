"""ε-sweeps of true-source and false-source convergence."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from belief_impact.errors import InvalidModelError
from belief_impact.models.scenario import ConvergenceCurve, ScenarioSpec
from belief_impact.services.policy import check_epsilon_grid, convergence_stat
from belief_impact.services.reporter import population_moments
from belief_impact.services.sampling import draw_stream, sample_scenario

logger = logging.getLogger(__name__)


def sweep_epsilon(
    spec: ScenarioSpec, epsilon_grid: Sequence[float], n_draws: int, rng_seed: int
) -> ConvergenceCurve:
    """c(x_t, ε) and c(x_s, ε) statistics across scenario draws.

    Every ε is evaluated on the same draws, and draw ``i`` always comes
    from the stream ``(rng_seed, i)``.
    """
    grid = check_epsilon_grid(epsilon_grid)
    if n_draws < 1:
        raise InvalidModelError("n_draws must be at least 1")
    logger.info(
        "Sweeping %d epsilons over %d draws (audience=%s, viewers=%d)",
        len(grid),
        n_draws,
        spec.audience,
        spec.n_viewers,
    )

    truth = np.empty((n_draws, len(grid)))
    source = np.empty((n_draws, len(grid)))
    progress_step = max(1, n_draws // 10)
    for i in range(n_draws):
        draw = sample_scenario(draw_stream(rng_seed, i), spec)
        moments = population_moments(draw.population)
        for j, epsilon in enumerate(grid):
            truth[i, j] = convergence_stat(draw.population, draw.x_t, draw.x_t, epsilon, moments)[0]
            source[i, j] = convergence_stat(draw.population, draw.x_s, draw.x_t, epsilon, moments)[0]
        if (i + 1) % progress_step == 0:
            logger.debug("Sweep progress: %d/%d draws", i + 1, n_draws)

    ddof = 1 if n_draws > 1 else 0
    curve = ConvergenceCurve(
        epsilons=grid,
        true_mean=truth.mean(axis=0).tolist(),
        true_std=truth.std(axis=0, ddof=ddof).tolist(),
        false_mean=source.mean(axis=0).tolist(),
        false_std=source.std(axis=0, ddof=ddof).tolist(),
        n_draws=n_draws,
    )
    if not all(np.isfinite(curve.true_std + curve.false_std)):
        logger.warning("Sweep produced non-finite standard deviations")
    return curve
