"""Gaussian viewer model: covariances, viewer profiles and populations."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg

from belief_impact.errors import DimensionMismatchError, InvalidModelError

# Absolute tolerance on max-entry norms for symmetry / identity checks.
MATRIX_TOL = 1e-10


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Covariance:
    """Symmetric positive-definite ``n×n`` matrix.

    Positive-definiteness is checked once, at construction, through a
    Cholesky factorisation which is kept for later solves.
    """

    matrix: np.ndarray
    _factor: tuple[np.ndarray, bool] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise InvalidModelError(f"covariance must be a non-empty square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidModelError("covariance has non-finite entries")
        if np.max(np.abs(m - m.T)) > MATRIX_TOL:
            raise InvalidModelError("covariance is not symmetric")
        m = 0.5 * (m + m.T)
        try:
            factor = linalg.cho_factor(m, lower=True)
        except linalg.LinAlgError as exc:
            raise InvalidModelError("covariance is not positive-definite") from exc
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "_factor", factor)

    @classmethod
    def identity(cls, dim: int, scale: float = 1.0) -> Covariance:
        return cls(scale * np.eye(dim))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Return ``matrix⁻¹ @ rhs`` using the cached Cholesky factor."""
        return linalg.cho_solve(self._factor, rhs)

    @cached_property
    def inverse(self) -> np.ndarray:
        return _frozen(self.solve(np.eye(self.dim)))

    @property
    def nuclear_norm(self) -> float:
        # SPD: singular values are the eigenvalues.
        return float(np.trace(self.matrix))

    def __repr__(self) -> str:
        return f"Covariance(dim={self.dim}, diag={np.diag(self.matrix).round(6).tolist()})"


@dataclass(frozen=True, eq=False)
class ViewerProfile:
    """One viewer: prior mean, prior covariance Σ_i, source covariance Σ_{s,i}.

    ``gain_a`` / ``gain_b`` are the posterior weights on the report and on
    the prior mean.  Build profiles with
    :func:`belief_impact.services.belief_core.build_profile`, which
    computes the gains; this constructor only checks consistency.
    """

    mu: np.ndarray
    sigma: Covariance
    sigma_s: Covariance
    gain_a: np.ndarray
    gain_b: np.ndarray

    def __post_init__(self) -> None:
        n = self.sigma.dim
        mu = np.array(self.mu, dtype=float)
        if mu.shape != (n,) or self.sigma_s.dim != n:
            raise DimensionMismatchError(f"viewer profile expects dimension {n}")
        if not np.all(np.isfinite(mu)):
            raise InvalidModelError("viewer prior mean has non-finite entries")
        gain_a = np.asarray(self.gain_a, dtype=float)
        gain_b = np.asarray(self.gain_b, dtype=float)
        if gain_a.shape != (n, n) or gain_b.shape != (n, n):
            raise DimensionMismatchError(f"gain matrices must be {n}x{n}")
        if np.max(np.abs(gain_a + gain_b - np.eye(n))) > MATRIX_TOL:
            raise InvalidModelError("gain matrices do not sum to the identity")
        object.__setattr__(self, "mu", _frozen(mu))
        object.__setattr__(self, "gain_a", gain_a)
        object.__setattr__(self, "gain_b", gain_b)

    @property
    def dim(self) -> int:
        return self.sigma.dim


@dataclass(frozen=True, eq=False)
class Population:
    """A finite audience standing in for the viewer distribution.

    Stored column-wise (stacked means and gains) so population statistics
    vectorise over viewers; :attr:`viewers` materialises the profiles.
    """

    means: np.ndarray
    gains_a: np.ndarray
    gains_b: np.ndarray
    sigmas: tuple[Covariance, ...]
    sigmas_s: tuple[Covariance, ...]
    ergodic: bool = field(init=False)

    def __post_init__(self) -> None:
        means = np.array(self.means, dtype=float)
        if means.ndim != 2 or means.shape[0] < 1:
            raise InvalidModelError("population must contain at least one viewer")
        size, n = means.shape
        gains_a = np.asarray(self.gains_a, dtype=float)
        gains_b = np.asarray(self.gains_b, dtype=float)
        if gains_a.shape != (size, n, n) or gains_b.shape != (size, n, n):
            raise DimensionMismatchError("population gains do not match its means")
        if len(self.sigmas) != size or len(self.sigmas_s) != size:
            raise DimensionMismatchError("population covariances do not match its means")
        if any(s.dim != n for s in (*self.sigmas, *self.sigmas_s)):
            raise DimensionMismatchError(f"all viewers must share dimension {n}")
        object.__setattr__(self, "means", _frozen(means))
        object.__setattr__(self, "gains_a", _frozen(gains_a))
        object.__setattr__(self, "gains_b", _frozen(gains_b))
        object.__setattr__(self, "sigmas", tuple(self.sigmas))
        object.__setattr__(self, "sigmas_s", tuple(self.sigmas_s))
        object.__setattr__(
            self,
            "ergodic",
            _all_same(self.sigmas) and _all_same(self.sigmas_s),
        )

    @classmethod
    def from_profiles(cls, profiles: Sequence[ViewerProfile]) -> Population:
        if not profiles:
            raise InvalidModelError("population must contain at least one viewer")
        return cls(
            means=np.stack([p.mu for p in profiles]),
            gains_a=np.stack([p.gain_a for p in profiles]),
            gains_b=np.stack([p.gain_b for p in profiles]),
            sigmas=tuple(p.sigma for p in profiles),
            sigmas_s=tuple(p.sigma_s for p in profiles),
        )

    @property
    def size(self) -> int:
        return self.means.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    @property
    def mu_bar(self) -> np.ndarray:
        """Empirical mean belief μ̄."""
        return self.means.mean(axis=0)

    @cached_property
    def prior_pull(self) -> np.ndarray:
        """Stacked ``Bᵢμᵢ``, the report-independent part of every adopted belief."""
        return _frozen(np.einsum("kij,kj->ki", self.gains_b, self.means))

    @cached_property
    def viewers(self) -> tuple[ViewerProfile, ...]:
        return tuple(
            ViewerProfile(
                mu=self.means[i],
                sigma=self.sigmas[i],
                sigma_s=self.sigmas_s[i],
                gain_a=self.gains_a[i],
                gain_b=self.gains_b[i],
            )
            for i in range(self.size)
        )

    def __repr__(self) -> str:
        return f"Population(size={self.size}, dim={self.dim}, ergodic={self.ergodic})"


def _all_same(covariances: tuple[Covariance, ...]) -> bool:
    first = covariances[0]
    return all(c is first or np.array_equal(c.matrix, first.matrix) for c in covariances)
