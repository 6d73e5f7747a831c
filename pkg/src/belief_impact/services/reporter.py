"""Well-informed reporter: population moments and the optimal filtered report.

The reporter minimises ``E‖Aᵢy + Bᵢμᵢ − x_s‖²`` subject to
``‖y − x_t‖ ≤ ε``.  Stationary points of the Lagrangian are

    y*(λ) = (Ā² + λI)⁻¹ (λx_t + Āᵀx_s − ABμ̄),

and λ* is the smallest non-negative λ whose report passes the filter.
``‖y*(λ) − x_t‖`` is continuous and non-increasing in λ, so λ* is found
by doubling an upper bracket and bisecting.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg, optimize

from belief_impact.errors import ConvergenceError, DegeneratePopulationError, InvalidModelError
from belief_impact.models.report import ReportComponents, ReportDesign, ReporterMoments
from belief_impact.models.viewer import Covariance, Population
from belief_impact.services.belief_core import (
    as_covariance,
    as_vec,
    gain_matrices,
    population_beliefs,
)

logger = logging.getLogger(__name__)

# Absolute tolerance on g(λ) = ‖y*(λ) − x_t‖ − ε at the returned multiplier.
GAP_TOL = 1e-8
MAX_ITERATIONS = 200


# ── Moments ──────────────────────────────────────────────


def population_moments(pop: Population) -> ReporterMoments:
    """Empirical reporter moments over the viewers of *pop*."""
    size = pop.size
    gains_a = pop.gains_a
    pull = pop.prior_pull
    a2 = np.einsum("kji,kjl->il", gains_a, gains_a) / size
    return ReporterMoments(
        a2=0.5 * (a2 + a2.T),
        abmu=np.einsum("kji,kj->i", gains_a, pull) / size,
        at=gains_a.mean(axis=0).T,
        bmu=pull.mean(axis=0),
        b2mu=float(np.einsum("ki,ki->", pull, pull) / size),
    )


def ergodic_moments(
    sigma: Covariance | ArrayLike,
    sigma_s: Covariance | ArrayLike,
    mu_bar: ArrayLike,
    mu_spread: ArrayLike | None = None,
) -> ReporterMoments:
    """Exact moments of an ergodic audience with μᵢ ~ (μ̄, mu_spread)."""
    sigma, sigma_s = as_covariance(sigma), as_covariance(sigma_s)
    mu_bar = as_vec(mu_bar, sigma.dim, "mu_bar")
    gain_a, gain_b = gain_matrices(sigma, sigma_s)
    pull = gain_b @ mu_bar
    spread = np.zeros((sigma.dim, sigma.dim)) if mu_spread is None else np.asarray(mu_spread, dtype=float)
    a2 = gain_a.T @ gain_a
    return ReporterMoments(
        a2=0.5 * (a2 + a2.T),
        abmu=gain_a.T @ pull,
        at=gain_a.T.copy(),
        bmu=pull,
        b2mu=float(pull @ pull + np.trace(gain_b @ spread @ gain_b.T)),
    )


# ── Closed-form report ───────────────────────────────────


def report_for_lambda(
    m: ReporterMoments, x_s: ArrayLike, x_t: ArrayLike, lam: float
) -> np.ndarray:
    """Stationary point of the Lagrangian for a fixed multiplier *lam*."""
    if not lam >= 0:
        raise InvalidModelError(f"lambda must be non-negative, got {lam}")
    x_s = as_vec(x_s, m.dim, "x_s")
    x_t = as_vec(x_t, m.dim, "x_t")
    factor = _factorize(m, lam)
    return linalg.cho_solve(factor, lam * x_t + m.at @ x_s - m.abmu)


def report_components(
    m: ReporterMoments, x_s: ArrayLike, x_t: ArrayLike, lam: float
) -> ReportComponents:
    """Split y*(λ) into the truth, source and prior-offset contributions."""
    if not lam >= 0:
        raise InvalidModelError(f"lambda must be non-negative, got {lam}")
    x_s = as_vec(x_s, m.dim, "x_s")
    x_t = as_vec(x_t, m.dim, "x_t")
    factor = _factorize(m, lam)
    return ReportComponents(
        truth=linalg.cho_solve(factor, lam * x_t),
        source=linalg.cho_solve(factor, m.at @ x_s),
        prior_offset=-linalg.cho_solve(factor, m.abmu),
    )


def optimal_report(
    m: ReporterMoments, x_s: ArrayLike, x_t: ArrayLike, epsilon: float
) -> ReportDesign:
    """Best report that passes the ε-ball filter around *x_t*.

    ``epsilon = math.inf`` skips the filter (λ* = 0).
    """
    if not epsilon > 0:
        raise InvalidModelError(f"epsilon must be positive, got {epsilon}")
    x_s = as_vec(x_s, m.dim, "x_s")
    x_t = as_vec(x_t, m.dim, "x_t")

    y_free = report_for_lambda(m, x_s, x_t, 0.0)
    if np.linalg.norm(y_free - x_t) <= epsilon:
        return ReportDesign(
            y_star=y_free,
            lambda_star=0.0,
            objective=m.objective(y_free, x_s),
            binding=False,
            epsilon=epsilon,
        )

    lam = _smallest_feasible_lambda(m, x_s, x_t, epsilon)
    y_star = project_onto_ball(report_for_lambda(m, x_s, x_t, lam), x_t, epsilon)
    return ReportDesign(
        y_star=y_star,
        lambda_star=lam,
        objective=m.objective(y_star, x_s),
        binding=True,
        epsilon=epsilon,
    )


def project_onto_ball(y: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection of *y* onto the closed ball ``‖· − center‖ ≤ radius``."""
    offset = y - center
    dist = float(np.linalg.norm(offset))
    if dist <= radius:
        return y
    projected = center + (radius / dist) * offset
    # Rounding in the addition can leave the point just outside the ball.
    shrink = np.finfo(float).eps
    while np.linalg.norm(projected - center) > radius:
        shrink *= 2.0
        projected = center + (radius / dist) * (1.0 - shrink) * offset
    return projected


def _factorize(m: ReporterMoments, lam: float) -> tuple[np.ndarray, bool]:
    try:
        return linalg.cho_factor(m.a2 + lam * np.eye(m.dim), lower=True)
    except linalg.LinAlgError as exc:
        raise DegeneratePopulationError(
            "a2 moment is singular; some viewer has an infinitely hesitant prior"
        ) from exc


def _smallest_feasible_lambda(
    m: ReporterMoments, x_s: np.ndarray, x_t: np.ndarray, epsilon: float
) -> float:
    # ‖y*(λ) − x_t‖ = ‖(Ā² + λI)⁻¹(Āᵀx_s − ABμ̄ − Ā²x_t)‖, diagonalised once.
    eigvals, eigvecs = np.linalg.eigh(m.a2)
    eigvals = np.clip(eigvals, 0.0, None)
    coeffs = eigvecs.T @ (m.at @ x_s - m.abmu - m.a2 @ x_t)

    def gap(lam: float) -> float:
        with np.errstate(divide="ignore"):
            return float(np.linalg.norm(coeffs / (eigvals + lam))) - epsilon

    upper = 1.0
    for _ in range(MAX_ITERATIONS):
        if gap(upper) <= 0:
            break
        upper *= 2.0
    else:
        raise ConvergenceError(
            f"no feasible lambda up to {upper:.3e} (epsilon={epsilon}, gap={gap(upper):.3e})"
        )
    lower = 0.0 if upper == 1.0 else upper / 2.0
    logger.debug("Lambda bracket [%g, %g] for epsilon=%g", lower, upper, epsilon)

    lam, result = optimize.bisect(
        gap, lower, upper, xtol=1e-15, maxiter=MAX_ITERATIONS, full_output=True, disp=False
    )
    residual = gap(lam)
    if not result.converged or abs(residual) > GAP_TOL * max(1.0, epsilon):
        raise ConvergenceError(
            f"bisection stopped after {result.iterations} iterations: "
            f"lambda={lam:.6e}, gap={residual:.3e}, bracket=[{lower:.3e}, {upper:.3e}]"
        )
    logger.debug("lambda*=%.10g after %d bisection steps", lam, result.iterations)
    return float(lam)


# ── Ergodic special cases ────────────────────────────────


def exaggeration(
    sigma: Covariance | ArrayLike,
    sigma_s: Covariance | ArrayLike,
    mu_bar: ArrayLike,
    x: ArrayLike,
) -> np.ndarray:
    """``Σ_sΣ⁻¹(x − μ̄)``: what the unconstrained reporter adds to an honest report."""
    sigma, sigma_s = as_covariance(sigma), as_covariance(sigma_s)
    surprise = as_vec(x, sigma.dim, "x") - as_vec(mu_bar, sigma.dim, "mu_bar")
    return sigma_s.matrix @ sigma.solve(surprise)


def ergodic_unconstrained_report(
    sigma: Covariance | ArrayLike,
    sigma_s: Covariance | ArrayLike,
    mu_bar: ArrayLike,
    x_s: ArrayLike,
) -> np.ndarray:
    """Closed-form λ = 0 report ``x_s + Σ_sΣ⁻¹(x_s − μ̄)`` for ergodic audiences."""
    return as_vec(x_s, name="x_s") + exaggeration(sigma, sigma_s, mu_bar, x_s)


def honest_report_gap(
    sigma: Covariance | ArrayLike,
    sigma_s: Covariance | ArrayLike,
    mu_bar: ArrayLike,
    x_t: ArrayLike,
    epsilon: float,
) -> float:
    """Exaggeration a truthful reporter wants, in units of the filter radius."""
    if not epsilon > 0:
        raise InvalidModelError(f"epsilon must be positive, got {epsilon}")
    if math.isinf(epsilon):
        return 0.0
    return float(np.linalg.norm(exaggeration(sigma, sigma_s, mu_bar, x_t))) / epsilon


def exaggeration_allowance(
    sigma: Covariance | ArrayLike, sigma_s: Covariance | ArrayLike
) -> float:
    """Nuclear-norm ratio ``‖Σ‖_* / ‖Σ_s‖_*``; larger allows more exaggeration."""
    sigma, sigma_s = as_covariance(sigma), as_covariance(sigma_s)
    return sigma.nuclear_norm / sigma_s.nuclear_norm


# ── Objectives ───────────────────────────────────────────


def expected_sq_objective(pop: Population, y: ArrayLike, x_s: ArrayLike) -> float:
    """Population mean of ``‖Aᵢy + Bᵢμᵢ − x_s‖²``."""
    x_s = as_vec(x_s, pop.dim, "x_s")
    residuals = population_beliefs(pop, y) - x_s
    return float(np.einsum("ki,ki->", residuals, residuals) / pop.size)


def lambda0_residual_energy(pop: Population) -> float:
    """``E (μᵢ − μ̄)ᵀBᵢᵀBᵢ(μᵢ − μ̄)``.

    For ergodic populations this is the squared objective at the
    unconstrained optimum, whatever the source.
    """
    offsets = np.einsum("kij,kj->ki", pop.gains_b, pop.means - pop.mu_bar)
    return float(np.einsum("ki,ki->", offsets, offsets) / pop.size)
