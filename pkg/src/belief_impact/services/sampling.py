"""Scenario samplers: unit-sphere vectors, audiences and conditioned draws.

Every Monte Carlo sample ``i`` gets its own generator derived from
``(seed, i)``, so results do not depend on evaluation order.
"""

from __future__ import annotations

import logging

import numpy as np

from belief_impact.errors import InfeasibleSamplingError, InvalidModelError
from belief_impact.models.scenario import Audience, ScenarioDraw, ScenarioSpec
from belief_impact.models.viewer import Population
from belief_impact.services.belief_core import build_profile, ergodic_population

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 100_000
# Spawn key reserved for the acceptance-rate probe; sample streams use 0, 1, 2, …
PROBE_STREAM = 2**32 - 1


def draw_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sample *index* of a run seeded with *seed*."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_unit_sphere(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Uniform direction in R^dim via a normalised isotropic Gaussian."""
    if dim < 1:
        raise InvalidModelError("dim must be at least 1")
    while True:
        z = rng.standard_normal(dim)
        norm = np.linalg.norm(z)
        if norm > 0:
            return z / norm


def sample_population(rng: np.random.Generator, spec: ScenarioSpec, mu_bar: np.ndarray) -> Population:
    """Audience of ``spec.n_viewers`` viewers with μᵢ ~ N(μ̄, mu_spread)."""
    z = rng.standard_normal((spec.n_viewers, spec.dim))
    means = mu_bar + z @ spec.spread_root.T
    if spec.heterogeneity == 0:
        return ergodic_population(spec.sigma, spec.sigma_s, means)

    scales = np.exp(spec.heterogeneity * rng.standard_normal((spec.n_viewers, 2)))
    profiles = [
        build_profile(mu, a * spec.sigma.matrix, b * spec.sigma_s.matrix)
        for mu, (a, b) in zip(means, scales, strict=True)
    ]
    return Population.from_profiles(profiles)


def audience_condition(audience: Audience, x_t: np.ndarray, x_s: np.ndarray, mu_bar: np.ndarray) -> bool:
    """Whether a draw belongs to the given audience type."""
    if audience is Audience.INDIFFERENT:
        return True
    to_source = np.linalg.norm(mu_bar - x_s)
    to_truth = np.linalg.norm(mu_bar - x_t)
    if audience is Audience.UNEDUCATED:
        return bool(to_source <= to_truth)
    return bool(to_source >= to_truth)


def sample_scenario(
    rng: np.random.Generator,
    spec: ScenarioSpec,
    min_separation: float = 0.0,
    max_attempts: int = MAX_ATTEMPTS,
) -> ScenarioDraw:
    """Draw x_t, x_s, μ̄ from the unit sphere, rejecting until the audience
    condition (and ``‖x_t − x_s‖ ≥ min_separation``) holds, then sample the
    audience around μ̄.
    """
    for attempt in range(1, max_attempts + 1):
        x_t = sample_unit_sphere(rng, spec.dim)
        x_s = sample_unit_sphere(rng, spec.dim)
        mu_bar = sample_unit_sphere(rng, spec.dim)
        if spec.source_is_truth:
            x_s = x_t.copy()
        if np.linalg.norm(x_t - x_s) < min_separation:
            continue
        if not audience_condition(spec.audience, x_t, x_s, mu_bar):
            continue
        if attempt > 1:
            logger.debug("Scenario accepted after %d attempts", attempt)
        return ScenarioDraw(
            x_t=x_t,
            x_s=x_s,
            mu_bar=mu_bar,
            population=sample_population(rng, spec, mu_bar),
        )
    raise InfeasibleSamplingError(
        f"no acceptable scenario in {max_attempts} attempts "
        f"(audience={spec.audience}, min_separation={min_separation})"
    )


def acceptance_rate(spec: ScenarioSpec, min_separation: float, seed: int, probe_size: int = 20_000) -> float:
    """Estimated acceptance probability of :func:`sample_scenario` from a probe batch."""
    rng = draw_stream(seed, PROBE_STREAM)
    z = rng.standard_normal((3, probe_size, spec.dim))
    x_t, x_s, mu_bar = z / np.linalg.norm(z, axis=2, keepdims=True)
    if spec.source_is_truth:
        x_s = x_t
    accepted = np.linalg.norm(x_t - x_s, axis=1) >= min_separation
    to_source = np.linalg.norm(mu_bar - x_s, axis=1)
    to_truth = np.linalg.norm(mu_bar - x_t, axis=1)
    if spec.audience is Audience.UNEDUCATED:
        accepted &= to_source <= to_truth
    elif spec.audience is Audience.EDUCATED:
        accepted &= to_source >= to_truth
    return float(accepted.mean())
