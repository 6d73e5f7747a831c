"""Gaussian belief update: gain matrices, MAP posterior beliefs, convergence.

A viewer with prior ``N(μᵢ, Σᵢ)`` who trusts the reporting channel up to
noise ``N(0, Σ_{s,i})`` adopts, after seeing a report ``y``, the MAP
belief ``ζᵢ(y) = Aᵢy + Bᵢμᵢ`` where

    Aᵢ = (Σᵢ⁻¹ + Σ_{s,i}⁻¹)⁻¹ Σ_{s,i}⁻¹,   Bᵢ = (Σᵢ⁻¹ + Σ_{s,i}⁻¹)⁻¹ Σᵢ⁻¹.
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg

from belief_impact.errors import DimensionMismatchError, InvalidModelError
from belief_impact.models.viewer import Covariance, Population, ViewerProfile

logger = logging.getLogger(__name__)


def as_vec(values: ArrayLike, dim: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce *values* to a finite float vector, optionally of length *dim*."""
    try:
        vec = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidModelError(f"{name} is not a numeric vector") from exc
    if vec.ndim != 1:
        raise DimensionMismatchError(f"{name} must be one-dimensional, got shape {vec.shape}")
    if dim is not None and vec.shape[0] != dim:
        raise DimensionMismatchError(f"{name} must have length {dim}, got {vec.shape[0]}")
    if not np.all(np.isfinite(vec)):
        raise InvalidModelError(f"{name} has non-finite entries")
    return vec


def as_covariance(value: Covariance | ArrayLike) -> Covariance:
    return value if isinstance(value, Covariance) else Covariance(np.asarray(value, dtype=float))


def gain_matrices(
    sigma: Covariance | ArrayLike, sigma_s: Covariance | ArrayLike
) -> tuple[np.ndarray, np.ndarray]:
    """Return the posterior gains ``(A, B)`` for prior Σ and source covariance Σ_s."""
    sigma, sigma_s = as_covariance(sigma), as_covariance(sigma_s)
    if sigma.dim != sigma_s.dim:
        raise DimensionMismatchError(
            f"sigma is {sigma.dim}x{sigma.dim} but sigma_s is {sigma_s.dim}x{sigma_s.dim}"
        )
    precision = sigma.inverse + sigma_s.inverse
    try:
        factor = linalg.cho_factor(precision, lower=True)
    except linalg.LinAlgError as exc:
        raise InvalidModelError("posterior precision is not positive-definite") from exc
    gain_a = linalg.cho_solve(factor, sigma_s.inverse)
    gain_b = linalg.cho_solve(factor, sigma.inverse)
    return gain_a, gain_b


def build_profile(
    mu: ArrayLike, sigma: Covariance | ArrayLike, sigma_s: Covariance | ArrayLike
) -> ViewerProfile:
    """Construct a :class:`ViewerProfile` with its gains precomputed."""
    sigma, sigma_s = as_covariance(sigma), as_covariance(sigma_s)
    gain_a, gain_b = gain_matrices(sigma, sigma_s)
    return ViewerProfile(
        mu=as_vec(mu, sigma.dim, "mu"),
        sigma=sigma,
        sigma_s=sigma_s,
        gain_a=gain_a,
        gain_b=gain_b,
    )


def ergodic_population(
    sigma: Covariance | ArrayLike, sigma_s: Covariance | ArrayLike, means: ArrayLike
) -> Population:
    """Population whose viewers share Σ and Σ_s; gains are computed once."""
    sigma, sigma_s = as_covariance(sigma), as_covariance(sigma_s)
    means = np.atleast_2d(np.asarray(means, dtype=float))
    size, n = means.shape
    if n != sigma.dim:
        raise DimensionMismatchError(f"prior means must have length {sigma.dim}, got {n}")
    gain_a, gain_b = gain_matrices(sigma, sigma_s)
    return Population(
        means=means,
        gains_a=np.broadcast_to(gain_a, (size, n, n)),
        gains_b=np.broadcast_to(gain_b, (size, n, n)),
        sigmas=(sigma,) * size,
        sigmas_s=(sigma_s,) * size,
    )


def posterior_belief(profile: ViewerProfile, y: ArrayLike) -> np.ndarray:
    """MAP belief ``ζᵢ(y) = Aᵢy + Bᵢμᵢ`` adopted after seeing report *y*."""
    y = as_vec(y, profile.dim, "y")
    return profile.gain_a @ y + profile.gain_b @ profile.mu


def log_posterior(profile: ViewerProfile, x: ArrayLike, y: ArrayLike) -> float:
    """Unnormalised Gaussian log-posterior of belief *x* given report *y*.

    Uses the standard quadratic form ``(x − y)ᵀΣ_s⁻¹(x − y)`` for the
    likelihood term.
    """
    x = as_vec(x, profile.dim, "x")
    y = as_vec(y, profile.dim, "y")
    prior = x - profile.mu
    likelihood = x - y
    return -float(prior @ profile.sigma.solve(prior)) - float(likelihood @ profile.sigma_s.solve(likelihood))


def population_beliefs(pop: Population, y: ArrayLike) -> np.ndarray:
    """Adopted beliefs of every viewer, stacked ``(N, n)``."""
    y = as_vec(y, pop.dim, "y")
    return pop.gains_a @ y + pop.prior_pull


def conveyance_distance(x_s: ArrayLike, zeta: ArrayLike) -> float:
    """Euclidean distance between the intended information and an adopted belief."""
    x_s = as_vec(x_s, name="x_s")
    zeta = as_vec(zeta, x_s.shape[0], "zeta")
    return float(np.linalg.norm(x_s - zeta))


def population_conveyance(pop: Population, x_s: ArrayLike, y: ArrayLike) -> tuple[float, float]:
    """Mean and standard deviation of ``‖x_s − ζᵢ(y)‖`` over the audience."""
    x_s = as_vec(x_s, pop.dim, "x_s")
    distances = np.linalg.norm(population_beliefs(pop, y) - x_s, axis=1)
    return float(distances.mean()), float(distances.std())
