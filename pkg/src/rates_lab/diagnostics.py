"""Invariant suites exercised by tests and by the `lemmas` CLI command."""

from __future__ import annotations

import numpy as np

from .checks import CheckResult
from .concentration import sup_fraction
from .lower_bound import gilbert_varshamov
from .power_space import CoefficientVector, power_norm
from .solver import approximation_error, effective_dimension, effective_dimension_bound
from .spectrum import SpectrumModel, basis_matrix, embedding_constant


def approximation_error_suite(
    model: SpectrumModel, f_star: CoefficientVector, grid: int = 5
) -> list[CheckResult]:
    """Exact approximation error vs the closed-form decay bound.

    Over a grid of (lam, gamma, beta) with beta >= gamma, checks
    approximation_error(f, lam, gamma) <= power_norm(f, beta)^2 * lam^(beta-gamma).
    """
    lams = np.logspace(-3, 1, grid)
    gammas = np.linspace(0.0, 1.0, grid)
    violations = 0
    total = 0
    for gamma in gammas:
        for beta in np.linspace(gamma, 2.0, grid):
            norm_sq = power_norm(f_star, beta) ** 2
            for lam in lams:
                total += 1
                exact = approximation_error(f_star, float(lam), float(gamma))
                bound = norm_sq * float(lam) ** (beta - gamma)
                if exact > bound * (1.0 + 1e-12):
                    violations += 1
    return [
        CheckResult(
            "approximation_error_bound",
            violations == 0,
            f"{violations}/{total} grid violations of the lam^(beta-gamma) bound",
        )
    ]


def l2_linf_suite(
    model: SpectrumModel,
    lam: float = 0.1,
    alphas: tuple[float, ...] = (0.5, 1.0),
    grid_points: int = 100_000,
) -> list[CheckResult]:
    """Pointwise and averaged identities for the regularized spectral sum.

    With w_i = mu_i / (mu_i + lam): (i) sup_x sum_i w_i e_i(x)^2 is bounded by
    embedding_constant(alpha)^2 * lam^(-alpha); (ii) the average of the sum
    over a uniform midpoint grid equals the effective dimension N(lam).
    """
    checks = []
    w = model.eigenvalues / (model.eigenvalues + lam)
    # the sup over x: every term is maximal at x = 0 for the cosine family
    sup_val = float(w[0] + 2.0 * w[1:].sum())
    for alpha in alphas:
        cap = embedding_constant(model, alpha) ** 2 * lam ** (-alpha)
        checks.append(
            CheckResult(
                f"regularized_sum_sup_alpha_{alpha}",
                sup_val <= cap * (1.0 + 1e-12),
                f"sup = {sup_val:.6g} vs A^2 lam^-alpha = {cap:.6g}",
            )
        )
    mids = (np.arange(grid_points) + 0.5) / grid_points
    avg = 0.0
    for start in range(0, grid_points, 4096):
        e = basis_matrix(model, mids[start : start + 4096])
        avg += float((e**2 @ w).sum())
    avg /= grid_points
    n_eff = effective_dimension(model, lam)
    checks.append(
        CheckResult(
            "regularized_sum_average",
            abs(avg - n_eff) <= 1e-4,
            f"grid average {avg:.8f} vs N(lam) = {n_eff:.8f}",
        )
    )
    return checks


def sup_fraction_suite(count: int = 50, seed: int = 0) -> list[CheckResult]:
    """Envelope and optimality spot checks for sup_{t>=0} t^b/(a+t)."""
    rng = np.random.default_rng(seed)
    bad_envelope = bad_optimal = 0
    for _ in range(count):
        a = float(10.0 ** rng.uniform(-3, 3))
        b = float(rng.uniform(0.0, 1.0))
        value, argmax = sup_fraction(a, b)
        envelope = a ** (b - 1.0)
        if not (0.5 * envelope - 1e-12 <= value <= envelope * (1.0 + 1e-12)):
            bad_envelope += 1
        for t in (argmax * 0.9 + 1e-12, argmax * 1.1 + 1e-12):
            if t**b / (a + t) > value * (1.0 + 1e-12):
                bad_optimal += 1
    for b, expect_argmax in ((0.0, 0.0), (1.0, np.inf)):
        value, argmax = sup_fraction(1.0, b)
        if argmax != expect_argmax:
            bad_optimal += 1
    return [
        CheckResult("sup_fraction_envelope", bad_envelope == 0, f"{bad_envelope}/{count} envelope failures"),
        CheckResult("sup_fraction_optimality", bad_optimal == 0, f"{bad_optimal} local-optimality failures"),
    ]


def code_suite(ms: tuple[int, ...] = (8, 16, 32), seed: int = 0) -> list[CheckResult]:
    """Construct codes and verify size and distance guarantees."""
    checks = []
    for m in ms:
        code = gilbert_varshamov(m, seed=seed)
        size_ok = code.words.shape[0] - 1 >= 2.0 ** (m / 8.0)
        dist_ok = code.min_sq_distance >= m / 8.0
        checks.append(
            CheckResult(
                f"code_m_{m}",
                size_ok and dist_ok,
                f"{code.words.shape[0] - 1} words, min squared distance {code.min_sq_distance}",
            )
        )
    return checks


def effective_dimension_suite(model: SpectrumModel, grid: int = 13) -> list[CheckResult]:
    """N(lam) against the closed-form growth bound from the decay parameters."""
    if model.decay is None:
        raise ValueError("effective dimension suite requires decay parameters")
    lams = np.logspace(-6, 0, grid)
    worst = 0.0
    for lam in lams:
        ratio = effective_dimension(model, float(lam)) / effective_dimension_bound(model, float(lam))
        worst = max(worst, ratio)
    return [
        CheckResult(
            "effective_dimension_growth",
            worst <= 1.0 + 1e-12,
            f"max N(lam)/bound = {worst:.6g} over lam in [1e-6, 1]",
        )
    ]


def run_all(model: SpectrumModel, f_star: CoefficientVector | None = None) -> dict[str, list[CheckResult]]:
    """Every suite; used by the `lemmas` command."""
    if f_star is None:
        idx = np.arange(1, model.truncation + 1, dtype=float)
        f_star = CoefficientVector(idx ** (-1.5), model)
    suites = {
        "approximation_error": approximation_error_suite(model, f_star),
        "l2_linf": l2_linf_suite(model),
        "sup_fraction": sup_fraction_suite(),
        "codes": code_suite(),
    }
    if model.decay is not None:
        suites["effective_dimension"] = effective_dimension_suite(model)
    return suites
