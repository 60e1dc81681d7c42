"""Regularized least-squares regression in the truncated kernel space.

The estimator minimizes

    lam * ||f||_H^2 + (1/n) sum_i (y_i - f(x_i))^2

over the reproducing kernel space of the model.  By the representer theorem
the minimizer is f = sum_j alpha_j k(x_j, .) where the dual weights solve the
symmetric positive-definite system (K + n*lam*I) alpha = y.  This module also
carries the population-level quantities the theory is phrased in: the
population regularized solution, the exact approximation-error identity, the
effective dimension, and the finite-sample oracle bound on the estimation
error in power norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SolverError
from .power_space import CoefficientVector, power_norm
from .spectrum import SpectrumModel, as_points, basis_matrix, embedding_constant, gram_matrix

# Residual tolerance for the dual solve and the diagonal jitter ladder tried
# before giving up on a factorization.
_RESIDUAL_TOL = 1e-8
_JITTERS = (0.0, 1e-12, 1e-10, 1e-8)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Sample (x_i, y_i), x_i in [0, 1], with optional seed provenance."""

    xs: np.ndarray
    ys: np.ndarray
    seed: object = None

    def __post_init__(self):
        xs = np.atleast_1d(as_points(self.xs, "xs")).astype(float)
        ys = np.asarray(self.ys, dtype=float)
        if ys.shape != xs.shape:
            raise ValueError("xs and ys must have identical shapes")
        if not np.all(np.isfinite(ys)):
            raise ValueError("ys must be finite")
        if xs.size == 0:
            raise ValueError("dataset must contain at least one sample")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return int(self.xs.size)


@dataclass(frozen=True, eq=False)
class DualWeights:
    """Solution of (K + n*lam*I) alpha = y plus solve metadata."""

    alphas: np.ndarray
    xs: np.ndarray
    lam: float
    model: SpectrumModel
    residual: float
    seed: object = None

    @property
    def n(self) -> int:
        return int(self.alphas.size)

    def record(self) -> dict:
        """JSON-ready summary of the fit."""
        return {
            "lambda": self.lam,
            "n": self.n,
            "residual": self.residual,
            "seed": self.seed if (self.seed is None or isinstance(self.seed, int)) else list(self.seed),
        }


def fit(model: SpectrumModel, data: Dataset, lam: float) -> DualWeights:
    """Solve the dual system with a Cholesky factorization.

    Escalates a diagonal jitter (1e-12 up to 1e-8) if the factorization fails
    or the residual check does not meet 1e-8 * (1 + ||y||_inf); raises
    SolverError when the ladder is exhausted.
    """
    if not (lam > 0.0 and math.isfinite(lam)):
        raise ValueError("lam must be positive and finite")
    n = data.n
    k = gram_matrix(model, data.xs)
    m = k + (n * lam) * np.eye(n)
    tol = _RESIDUAL_TOL * (1.0 + float(np.abs(data.ys).max()))
    last = math.inf
    for jitter in _JITTERS:
        try:
            factor = scipy.linalg.cho_factor(m + jitter * np.eye(n) if jitter else m, lower=True)
            alpha = scipy.linalg.cho_solve(factor, data.ys)
        except scipy.linalg.LinAlgError:
            continue
        last = float(np.abs(m @ alpha - data.ys).max())
        if last <= tol:
            return DualWeights(
                alphas=alpha, xs=data.xs, lam=float(lam), model=model, residual=last, seed=data.seed
            )
    raise SolverError(
        f"dual system not solvable to residual {tol:.3e} after jitter escalation (best {last:.3e})"
    )


def predict(weights: DualWeights, points) -> float | np.ndarray:
    """Evaluate the fitted function sum_j alpha_j k(x_j, .) at points."""
    arr = np.asarray(points, dtype=float)
    e_train = basis_matrix(weights.model, weights.xs)
    spectral = weights.model.eigenvalues * (e_train.T @ weights.alphas)
    vals = basis_matrix(weights.model, points) @ spectral
    if arr.ndim == 0:
        return float(vals[0])
    return vals


def extract_coefficients(weights: DualWeights) -> CoefficientVector:
    """L2(nu) coefficients of the fitted function.

    Since <k(x_j, .), e_i> in L2 equals mu_i e_i(x_j), the i-th coefficient is
    mu_i * sum_j alpha_j e_i(x_j).
    """
    e_train = basis_matrix(weights.model, weights.xs)
    a = weights.model.eigenvalues * (e_train.T @ weights.alphas)
    return CoefficientVector(a, weights.model)


def population_solution(f_star: CoefficientVector, lam: float) -> CoefficientVector:
    """Infinite-sample regularized solution: coefficients a_i mu_i/(mu_i+lam)."""
    if not lam > 0.0:
        raise ValueError("lam must be positive")
    mu = f_star.model.eigenvalues
    return CoefficientVector(f_star.coefficients * mu / (mu + lam), f_star.model)


def approximation_error(f_star: CoefficientVector, lam: float, gamma: float) -> float:
    """Exact squared gamma-norm distance between f_star and its population fit.

    Equals lam^2 * sum_i a_i^2 mu_i^(-gamma) / (mu_i + lam)^2.  For a target
    with finite beta-norm and gamma <= beta it is bounded by
    power_norm(f_star, beta)^2 * lam^(beta - gamma).
    """
    if not lam > 0.0:
        raise ValueError("lam must be positive")
    if not 0.0 <= gamma <= 2.0:
        raise ValueError("gamma must lie in [0, 2]")
    mu = f_star.model.eigenvalues
    terms = f_star.coefficients**2 * mu ** (-gamma) / (mu + lam) ** 2
    return float(lam * lam * np.sum(terms))


def effective_dimension(model: SpectrumModel, lam: float) -> float:
    """N(lam) = sum_i mu_i / (mu_i + lam)."""
    if not lam > 0.0:
        raise ValueError("lam must be positive")
    mu = model.eigenvalues
    return float(np.sum(mu / (mu + lam)))


def effective_dimension_bound(model: SpectrumModel, lam: float) -> float:
    """Closed-form growth bound C * lam^(-p) implied by the decay parameters.

    C = c^p / (1 - p) for p < 1 and C = sum_i mu_i (the trace) for p = 1.
    """
    if not lam > 0.0:
        raise ValueError("lam must be positive")
    if model.decay is None:
        raise ValueError("effective_dimension_bound requires decay parameters")
    c, p = model.decay
    if p < 1.0:
        const = c**p / (1.0 - p)
    else:
        const = float(model.eigenvalues.sum())
    return const * lam ** (-p)


def oracle_bound(
    model: SpectrumModel,
    f_star: CoefficientVector,
    lam: float,
    n: int,
    tau: float,
    gamma: float,
    alpha: float,
    sigma: float,
    B: float,
) -> tuple[float, float]:
    """Finite-sample bound on the squared gamma-norm estimation error.

    Returns ``(bound, n0)`` where, with probability at least 1 - 4 e^(-tau)
    and for n >= n0, the squared gamma-norm distance between the empirical
    and population solutions is at most

        bound = 128 tau^2 / (n lam^gamma)
                * (5 N(lam) sigma_lam^2 + A^2 B_lam^2 / (n lam^alpha)),

    where A is the alpha-power embedding constant, N the effective dimension,
    and sigma_lam, B_lam inflate sigma, B by a sup-norm surrogate for the
    population residual f_star - f_lam:

        ||f_star - f_lam||_inf <= A * sqrt(approximation_error(f_star, lam, alpha)).

    The sample-size threshold is

        n0 = max(256 tau^2 A^2 lam^(-alpha) N(lam), 16 tau A^2 lam^(-alpha), tau).
    """
    if tau < 1.0:
        raise ValueError("tau must be at least 1")
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if not (sigma > 0.0 and B > 0.0):
        raise ValueError("sigma and B must be positive")
    if not lam > 0.0:
        raise ValueError("lam must be positive")
    a_const = embedding_constant(model, alpha)
    a_sq = a_const * a_const
    surrogate = a_const * math.sqrt(approximation_error(f_star, lam, alpha))
    sigma_lam = max(sigma, surrogate)
    b_lam = max(B, surrogate)
    n_eff = effective_dimension(model, lam)
    bound = (
        128.0
        * tau**2
        / (n * lam**gamma)
        * (5.0 * n_eff * sigma_lam**2 + a_sq * b_lam**2 / (n * lam**alpha))
    )
    n0 = max(256.0 * tau**2 * a_sq * lam ** (-alpha) * n_eff, 16.0 * tau * a_sq * lam ** (-alpha), tau)
    return float(bound), float(n0)


def estimation_error(weights: DualWeights, f_star: CoefficientVector, gamma: float) -> float:
    """Squared gamma-norm distance between the fit and the population solution."""
    f_lam = population_solution(f_star, weights.lam)
    return power_norm(extract_coefficients(weights) - f_lam, gamma) ** 2
