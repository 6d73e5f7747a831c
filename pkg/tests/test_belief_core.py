"""Tests for the Gaussian viewer model: gains, MAP beliefs and convergence."""

from __future__ import annotations

import numpy as np
import pytest
from scipy import optimize

from belief_impact.errors import DimensionMismatchError, InvalidModelError
from belief_impact.models.viewer import Covariance, Population
from belief_impact.services.belief_core import (
    build_profile,
    conveyance_distance,
    ergodic_population,
    gain_matrices,
    log_posterior,
    population_beliefs,
    population_conveyance,
    posterior_belief,
)
from belief_impact.services.validation import random_spd


# ── Helpers ──────────────────────────────────────────────

def _viewer(mu=(0.0, 0.0), sigma=1.0, sigma_s=0.5):
    return build_profile(mu, sigma * np.eye(2), sigma_s * np.eye(2))


def _pair(offset: float = 0.3) -> Population:
    return ergodic_population(np.eye(2), 0.5 * np.eye(2), [[offset, 0.0], [-offset, 0.0]])


# ──────────────────────────────────────────────────────────
# Test 1: Gain matrices for isotropic and diagonal covariances
# ──────────────────────────────────────────────────────────
def test_gain_matrices_isotropic():
    a, b = gain_matrices(np.eye(2), 0.5 * np.eye(2))
    np.testing.assert_allclose(a, (2 / 3) * np.eye(2), atol=1e-12)
    np.testing.assert_allclose(b, (1 / 3) * np.eye(2), atol=1e-12)


def test_gain_matrices_equal_trust():
    a, b = gain_matrices(np.eye(2), np.eye(2))
    np.testing.assert_allclose(a, 0.5 * np.eye(2), atol=1e-12)
    np.testing.assert_allclose(b, 0.5 * np.eye(2), atol=1e-12)


def test_gain_matrices_diagonal_matches_direct_inverse():
    sigma, sigma_s = np.diag([1.0, 2.0]), np.diag([0.5, 0.5])
    a, b = gain_matrices(sigma, sigma_s)
    np.testing.assert_allclose(a, np.diag([2 / 3, 4 / 5]), atol=1e-12)
    np.testing.assert_allclose(b, np.diag([1 / 3, 1 / 5]), atol=1e-12)

    posterior = np.linalg.inv(np.linalg.inv(sigma) + np.linalg.inv(sigma_s))
    np.testing.assert_allclose(a, posterior @ np.linalg.inv(sigma_s), atol=1e-12)
    np.testing.assert_allclose(b, posterior @ np.linalg.inv(sigma), atol=1e-12)


def test_gains_sum_to_identity_for_correlated_covariances():
    sigma = np.array([[1.0, 0.4], [0.4, 2.0]])
    sigma_s = np.array([[0.7, -0.2], [-0.2, 0.3]])
    a, b = gain_matrices(sigma, sigma_s)
    np.testing.assert_allclose(a + b, np.eye(2), atol=1e-12)


# ──────────────────────────────────────────────────────────
# Test 2: Invalid covariances are rejected at construction
# ──────────────────────────────────────────────────────────
def test_covariance_rejects_indefinite_matrix():
    with pytest.raises(InvalidModelError, match="positive-definite"):
        Covariance(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_covariance_rejects_asymmetric_matrix():
    with pytest.raises(InvalidModelError, match="symmetric"):
        Covariance(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_gain_matrices_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        gain_matrices(np.eye(2), np.eye(3))


# ──────────────────────────────────────────────────────────
# Test 3: MAP posterior beliefs
# ──────────────────────────────────────────────────────────
def test_posterior_belief_scales_report():
    np.testing.assert_allclose(posterior_belief(_viewer(), [3.0, 0.0]), [2.0, 0.0], atol=1e-12)


def test_report_confirming_prior_changes_nothing():
    viewer = build_profile([0.4, -1.2], [[1.0, 0.3], [0.3, 0.8]], [[0.6, 0.1], [0.1, 0.9]])
    np.testing.assert_allclose(posterior_belief(viewer, viewer.mu), viewer.mu, atol=1e-12)


def test_posterior_belief_is_log_posterior_maximiser():
    rng = np.random.default_rng(8)
    for _ in range(50):
        viewer = build_profile(rng.normal(size=2), random_spd(rng, 2), random_spd(rng, 2))
        y = rng.normal(size=2)
        prec, prec_s = viewer.sigma.inverse, viewer.sigma_s.inverse

        result = optimize.minimize(
            lambda x: -log_posterior(viewer, x, y),
            x0=y,
            jac=lambda x: 2.0 * (prec @ (x - viewer.mu) + prec_s @ (x - y)),
            method="BFGS",
            options={"gtol": 1e-12},
        )
        np.testing.assert_allclose(result.x, posterior_belief(viewer, y), atol=1e-6)


def test_posterior_belief_dimension_mismatch():
    with pytest.raises(DimensionMismatchError, match="y must have length 2"):
        posterior_belief(_viewer(), [1.0, 0.0, 0.0])


def test_perfect_credibility_limit():
    viewer = _viewer(mu=(5.0, -3.0), sigma=1.0, sigma_s=1e-8)
    np.testing.assert_allclose(posterior_belief(viewer, [0.7, 0.2]), [0.7, 0.2], atol=1e-6)


def test_closed_mind_limit():
    viewer = _viewer(mu=(5.0, -3.0), sigma=1e-8, sigma_s=1.0)
    np.testing.assert_allclose(posterior_belief(viewer, [0.7, 0.2]), [5.0, -3.0], atol=1e-6)


# ──────────────────────────────────────────────────────────
# Test 4: Conveyance distances
# ──────────────────────────────────────────────────────────
@pytest.mark.parametrize(
    ("x_s", "zeta", "expected"),
    [((1.0, 0.0), (1.0, 0.0), 0.0), ((1.0, 0.0), (0.0, 0.0), 1.0), ((3.0, 4.0), (0.0, 0.0), 5.0)],
)
def test_conveyance_distance(x_s, zeta, expected):
    assert conveyance_distance(x_s, zeta) == pytest.approx(expected)


def test_population_conveyance_exact_hit():
    pop = ergodic_population(np.eye(2), 0.5 * np.eye(2), [[0.0, 0.0]])
    mean, std = population_conveyance(pop, [1.0, 0.0], [1.5, 0.0])
    assert mean == pytest.approx(0.0, abs=1e-12)
    assert std == pytest.approx(0.0, abs=1e-12)


def test_population_conveyance_symmetric_pair():
    mean, std = population_conveyance(_pair(), [1.0, 0.0], [1.5, 0.0])
    assert mean == pytest.approx(0.1, abs=1e-12)
    assert std == pytest.approx(0.0, abs=1e-12)

    by_hand = [conveyance_distance([1.0, 0.0], posterior_belief(v, [1.5, 0.0])) for v in _pair().viewers]
    assert by_hand == pytest.approx([0.1, 0.1])


def test_population_beliefs_match_viewer_by_viewer():
    pop = _pair(0.8)
    stacked = population_beliefs(pop, [0.2, -0.4])
    for viewer, belief in zip(pop.viewers, stacked):
        np.testing.assert_allclose(belief, posterior_belief(viewer, [0.2, -0.4]), atol=1e-12)


def test_empty_population_rejected():
    with pytest.raises(InvalidModelError):
        Population.from_profiles([])
