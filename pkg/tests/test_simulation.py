"""Tests for scenario sampling and the ε-sweep of true/false convergence."""

from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from belief_impact.errors import InvalidModelError
from belief_impact.models.scenario import Audience, ScenarioSpec
from belief_impact.services.reporter import population_moments
from belief_impact.services.sampling import (
    acceptance_rate,
    draw_stream,
    sample_population,
    sample_scenario,
    sample_unit_sphere,
)
from belief_impact.services.simulation import sweep_epsilon


# ── Helpers ──────────────────────────────────────────────

def _spec(**overrides) -> ScenarioSpec:
    """Reference setup with a smaller audience so sweeps stay quick."""
    params = dict(n_viewers=60, d_min=0.0)
    params.update(overrides)
    return ScenarioSpec.reference_setup(**params)


def _standard_error(std: list[float], n: int) -> np.ndarray:
    return np.asarray(std) / np.sqrt(n)


# ──────────────────────────────────────────────────────────
# Test 1: Unit-sphere sampler
# ──────────────────────────────────────────────────────────
def test_unit_sphere_norm():
    rng = np.random.default_rng(0)
    for dim in (1, 2, 3, 7):
        assert np.linalg.norm(sample_unit_sphere(rng, dim)) == pytest.approx(1.0, abs=1e-12)


def test_unit_sphere_is_uniform():
    rng = np.random.default_rng(1)
    draws = np.array([sample_unit_sphere(rng, 2) for _ in range(100_000)])
    assert np.all(np.abs(draws.mean(axis=0)) < 0.02)

    angles = np.mod(np.arctan2(draws[:, 1], draws[:, 0]), 2 * np.pi)
    counts, _ = np.histogram(angles, bins=36, range=(0.0, 2 * np.pi))
    assert stats.chisquare(counts).pvalue > 0.001


def test_unit_sphere_rejects_bad_dim():
    with pytest.raises(InvalidModelError):
        sample_unit_sphere(np.random.default_rng(0), 0)


# ──────────────────────────────────────────────────────────
# Test 2: Audience sampler
# ──────────────────────────────────────────────────────────
def test_zero_spread_pins_means():
    spec = _spec(mu_spread=np.zeros((2, 2)), n_viewers=25)
    mu_bar = np.array([0.6, -0.8])
    pop = sample_population(np.random.default_rng(2), spec, mu_bar)
    np.testing.assert_array_equal(pop.means, np.tile(mu_bar, (25, 1)))


def test_spread_covariance_is_recovered():
    spec = _spec(n_viewers=10_000)
    pop = sample_population(np.random.default_rng(3), spec, np.zeros(2))
    np.testing.assert_allclose(np.cov(pop.means, rowvar=False), 0.1 * np.eye(2), atol=0.01)


def test_single_viewer_population_moments():
    spec = _spec(n_viewers=1)
    pop = sample_population(np.random.default_rng(4), spec, np.zeros(2))
    m = population_moments(pop)
    a = pop.gains_a[0]
    np.testing.assert_allclose(m.a2, a.T @ a, atol=1e-12)
    np.testing.assert_allclose(m.at, a.T, atol=1e-12)
    np.testing.assert_allclose(m.abmu, a.T @ pop.gains_b[0] @ pop.means[0], atol=1e-12)


def test_heterogeneous_audience_is_not_ergodic():
    pop = sample_population(np.random.default_rng(5), _spec(heterogeneity=0.5, n_viewers=10), np.zeros(2))
    assert not pop.ergodic
    np.testing.assert_allclose(pop.gains_a + pop.gains_b, np.broadcast_to(np.eye(2), (10, 2, 2)), atol=1e-10)


# ──────────────────────────────────────────────────────────
# Test 3: Scenario draws and audience conditions
# ──────────────────────────────────────────────────────────
def test_indifferent_audience_takes_first_draw():
    draw = sample_scenario(draw_stream(9, 0), _spec(n_viewers=1))
    replay = draw_stream(9, 0)
    np.testing.assert_array_equal(draw.x_t, sample_unit_sphere(replay, 2))
    np.testing.assert_array_equal(draw.x_s, sample_unit_sphere(replay, 2))
    np.testing.assert_array_equal(draw.mu_bar, sample_unit_sphere(replay, 2))


@pytest.mark.parametrize("audience", [Audience.UNEDUCATED, Audience.EDUCATED])
def test_audience_condition_holds_on_every_draw(audience):
    spec = _spec(n_viewers=1, audience=audience)
    for i in range(1000):
        draw = sample_scenario(draw_stream(17, i), spec)
        to_source = np.linalg.norm(draw.mu_bar - draw.x_s)
        to_truth = np.linalg.norm(draw.mu_bar - draw.x_t)
        if audience is Audience.UNEDUCATED:
            assert to_source <= to_truth
        else:
            assert to_source >= to_truth


def test_min_separation_is_enforced():
    spec = _spec(n_viewers=1)
    for i in range(200):
        draw = sample_scenario(draw_stream(23, i), spec, min_separation=1.1)
        assert np.linalg.norm(draw.x_t - draw.x_s) >= 1.1


def test_acceptance_rate_matches_geometry():
    # Two uniform unit vectors in the plane are ≥ 1.1 apart with probability 1 − 2·asin(0.55)/π.
    expected = 1 - 2 * np.arcsin(0.55) / np.pi
    assert acceptance_rate(_spec(), 1.1, seed=0) == pytest.approx(expected, abs=0.02)
    assert acceptance_rate(_spec(), 2.5, seed=0) == 0.0


# ──────────────────────────────────────────────────────────
# Test 4: ε-sweeps
# ──────────────────────────────────────────────────────────
def test_sweep_shape_and_determinism():
    spec = _spec(n_viewers=20)
    first = sweep_epsilon(spec, [0.5, 1.0, 2.0], n_draws=8, rng_seed=42)
    second = sweep_epsilon(spec, [0.5, 1.0, 2.0], n_draws=8, rng_seed=42)
    assert first == second
    assert first.epsilons == [0.5, 1.0, 2.0]
    assert first.n_draws == 8


def test_sweep_source_equal_truth_gives_identical_curves():
    spec = _spec(mu_spread=np.zeros((2, 2)), n_viewers=5, source_is_truth=True)
    curve = sweep_epsilon(spec, [0.1, 0.5, 1.5], n_draws=1, rng_seed=3)
    assert curve.true_mean == curve.false_mean
    assert curve.true_std == curve.false_std == [0.0, 0.0, 0.0]


def test_sweep_rejects_bad_grid():
    with pytest.raises(InvalidModelError):
        sweep_epsilon(_spec(), [], n_draws=1, rng_seed=0)
    with pytest.raises(InvalidModelError):
        sweep_epsilon(_spec(), [1.0, 0.5], n_draws=1, rng_seed=0)
    with pytest.raises(InvalidModelError):
        sweep_epsilon(_spec(), [0.5], n_draws=0, rng_seed=0)


def test_indifferent_sweep_truth_converges_better():
    n = 150
    curve = sweep_epsilon(_spec(), [0.2, 0.6, 1.0, 1.8, 3.0], n_draws=n, rng_seed=7)
    se = np.hypot(_standard_error(curve.true_std, n), _standard_error(curve.false_std, n))
    assert np.all(np.asarray(curve.true_mean) <= np.asarray(curve.false_mean) + 3 * se)


@pytest.mark.slow
def test_reference_sweep_shapes():
    """Full-size indifferent and uneducated sweeps over 0.1:0.1:3.0."""
    n = 2000
    grid = [round(0.1 * k, 12) for k in range(1, 31)]
    spec = ScenarioSpec.reference_setup(d_min=0.0)

    curve = sweep_epsilon(spec, grid, n_draws=n, rng_seed=2024)
    true_mean, false_mean = np.asarray(curve.true_mean), np.asarray(curve.false_mean)
    true_se = _standard_error(curve.true_std, n)
    false_se = _standard_error(curve.false_std, n)
    assert np.all(true_mean <= false_mean + 3 * np.hypot(true_se, false_se))
    assert np.all(np.diff(true_mean) <= 3 * true_se[1:])
    assert np.all(np.diff(false_mean) <= 3 * false_se[1:])

    uneducated = sweep_epsilon(
        ScenarioSpec.reference_setup(d_min=0.0, audience=Audience.UNEDUCATED), grid, n_draws=n, rng_seed=2024
    )
    for eps, f_mean, f_std, t_mean in zip(
        uneducated.epsilons, uneducated.false_mean, uneducated.false_std, uneducated.true_mean
    ):
        if eps >= 2.0:
            assert f_mean - f_std < t_mean


@pytest.mark.slow
def test_educated_sweep_false_source_lags_truth():
    """Educated audiences side with the truth at every filter radius."""
    n = 2000
    grid = [round(0.1 * k, 12) for k in range(1, 31)]
    spec = ScenarioSpec.reference_setup(d_min=0.0, n_viewers=100, audience=Audience.EDUCATED)

    curve = sweep_epsilon(spec, grid, n_draws=n, rng_seed=2024)
    se = np.hypot(_standard_error(curve.true_std, n), _standard_error(curve.false_std, n))
    assert np.all(np.asarray(curve.false_mean) + 3 * se > np.asarray(curve.true_mean))
