"""Minimax lower-bound machinery: packing families, KL budgets, testing game.

The construction: take a binary code of length m whose words are pairwise at
squared Hamming distance >= m/8, map each word omega to the function

    f_omega = 2 (8 eps / m)^(1/2) sum_{i=1}^m omega_i mu_{i+m}^(gamma/2) e_{i+m},

and play an (M+1)-ary hypothesis test against Gaussian regression noise.
Separation in the gamma norm, norm/sup budgets, and the KL divergences
between the sampling measures all have closed forms that the checks here
verify against direct computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .checks import CheckResult
from .errors import CodeConstructionError
from .power_space import CoefficientVector, eval_function, linf_bound, power_norm
from .solver import Dataset, extract_coefficients
from .solver import fit as solver_fit
from .spectrum import SpectrumModel, decay_fit, embedding_constant

# ---------------------------------------------------------------------------
# binary codes


@dataclass(frozen=True, eq=False)
class BinaryCode:
    """Binary words (rows), word 0 all zeros, pairwise sq. distance >= m/8."""

    words: np.ndarray  # (M+1, m) uint8
    m: int
    min_sq_distance: int

    @property
    def n_alternatives(self) -> int:
        return int(self.words.shape[0] - 1)


def _pairwise_min_distance(words: np.ndarray) -> int:
    diffs = words[:, None, :] != words[None, :, :]
    d = diffs.sum(axis=2)
    np.fill_diagonal(d, d.max() + 1)
    return int(d.min())


def gilbert_varshamov(
    m: int, target_m: int | None = None, seed: int = 0, max_tries: int = 200_000
) -> BinaryCode:
    """Randomized-greedy code construction with exhaustive verification.

    Keeps the all-zeros word, then accepts random words whose squared Hamming
    distance to every kept word is at least m/8, until 1 + target_m words are
    collected (default target_m = ceil(2^(m/8))).  Raises
    CodeConstructionError when max_tries is exhausted.  All pairwise
    distances are re-verified before returning.
    """
    if m < 8:
        raise ValueError("m must be at least 8")
    if target_m is None:
        target_m = math.ceil(2.0 ** (m / 8.0))
    if target_m < 1:
        raise ValueError("target_m must be at least 1")
    need = m / 8.0
    rng = np.random.default_rng(seed)
    kept = np.zeros((1, m), dtype=np.uint8)
    tries = 0
    while kept.shape[0] < target_m + 1:
        if tries >= max_tries:
            raise CodeConstructionError(
                f"code construction failed: {kept.shape[0] - 1}/{target_m} words after {max_tries} tries"
            )
        tries += 1
        cand = rng.integers(0, 2, size=m, dtype=np.uint8)
        if int((kept != cand).sum(axis=1).min()) >= need:
            kept = np.vstack([kept, cand])
    dmin = _pairwise_min_distance(kept)
    if dmin < need:  # exhaustive re-check; the greedy invariant guarantees it
        raise CodeConstructionError("constructed code violates the distance bound")
    return BinaryCode(words=kept, m=m, min_sq_distance=dmin)


# ---------------------------------------------------------------------------
# packing families


@dataclass(frozen=True, eq=False)
class PackingFamily:
    """Functions f_omega indexed by code words; f_0 is the zero function."""

    code: BinaryCode
    eps: float
    gamma: float
    functions: list[CoefficientVector]
    model: SpectrumModel

    @property
    def n_alternatives(self) -> int:
        return self.code.n_alternatives

    def to_json_dict(self) -> dict:
        return {
            "m": self.code.m,
            "eps": self.eps,
            "gamma": self.gamma,
            "min_sq_distance": self.code.min_sq_distance,
            "words": self.code.words.astype(int).tolist(),
            "coefficient_offset": self.code.m,
        }


def build_alternatives(
    model: SpectrumModel, code: BinaryCode, eps: float, gamma: float
) -> PackingFamily:
    """Map code words to packing functions in the gamma power space.

    Word omega gets coefficients a_{i+m} = 2 sqrt(8 eps / m) omega_i
    mu_{i+m}^(gamma/2) (1-based indices), so that pairwise squared gamma-norm
    distances equal (32 eps / m) times squared Hamming distances.
    Requires truncation >= 2m.
    """
    m = code.m
    if model.truncation < 2 * m:
        raise ValueError(f"truncation {model.truncation} below 2m = {2 * m}")
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    prefactor = 2.0 * math.sqrt(8.0 * eps / m)
    tail_mu = model.eigenvalues[m : 2 * m] ** (gamma / 2.0)
    functions = []
    for word in code.words:
        a = np.zeros(model.truncation)
        a[m : 2 * m] = prefactor * word * tail_mu
        functions.append(CoefficientVector(a, model))
    return PackingFamily(code=code, eps=eps, gamma=gamma, functions=functions, model=model)


def family_from_json(d: dict, model: SpectrumModel) -> PackingFamily:
    words = np.asarray(d["words"], dtype=np.uint8)
    code = BinaryCode(words=words, m=int(d["m"]), min_sq_distance=int(d["min_sq_distance"]))
    return build_alternatives(model, code, float(d["eps"]), float(d["gamma"]))


def budget_check(
    family: PackingFamily,
    beta: float,
    alpha: float,
    bnorm_cap: float | None = None,
    linf_cap: float | None = None,
) -> list[CheckResult]:
    """Verify norm and sup budgets of every alternative against closed forms.

    Checks, for each f_omega:
      * power_norm(f, beta)^2 <= 32 eps mu_{2m}^(-(beta-gamma))  (and <= bnorm_cap),
      * linf_bound(f, alpha)^2 <= 32 eps A^2 mu_{2m}^(gamma-alpha) for
        gamma < alpha, or 32 eps A^2 mu_m^(gamma-alpha) otherwise (and <= linf_cap),
    and, when decay parameters (c, p) are declared, the pairwise L2 budget
    power_norm(f - g, 0)^2 <= 32 c^gamma eps m^(-gamma/p).
    """
    m, eps, gamma = family.code.m, family.eps, family.gamma
    model = family.model
    if not 0.0 <= gamma < beta <= 2.0:
        raise ValueError("need 0 <= gamma < beta <= 2")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    mu_m = float(model.eigenvalues[m - 1])
    mu_2m = float(model.eigenvalues[2 * m - 1])
    a_sq = embedding_constant(model, alpha) ** 2
    norm_form = 32.0 * eps * mu_2m ** (gamma - beta)
    if gamma < alpha:
        sup_form = 32.0 * eps * a_sq * mu_2m ** (gamma - alpha)
    else:
        sup_form = 32.0 * eps * a_sq * mu_m ** (gamma - alpha)
    rel = 1.0 + 1e-12
    results = []
    worst_norm = worst_sup = 0.0
    for f in family.functions:
        worst_norm = max(worst_norm, power_norm(f, beta) ** 2)
        worst_sup = max(worst_sup, linf_bound(f, alpha) ** 2)
    results.append(
        CheckResult(
            "norm_budget_closed_form",
            worst_norm <= norm_form * rel,
            f"max ||f||_beta^2 = {worst_norm:.6g} vs 32 eps mu_2m^(gamma-beta) = {norm_form:.6g}",
        )
    )
    results.append(
        CheckResult(
            "sup_budget_closed_form",
            worst_sup <= sup_form * rel,
            f"max sup bound^2 = {worst_sup:.6g} vs closed form = {sup_form:.6g}",
        )
    )
    if bnorm_cap is not None:
        results.append(
            CheckResult(
                "norm_budget_cap",
                worst_norm <= bnorm_cap * rel,
                f"max ||f||_beta^2 = {worst_norm:.6g} vs cap = {bnorm_cap:.6g}",
            )
        )
    if linf_cap is not None:
        results.append(
            CheckResult(
                "sup_budget_cap",
                worst_sup <= linf_cap * rel,
                f"max sup bound^2 = {worst_sup:.6g} vs cap = {linf_cap:.6g}",
            )
        )
    if model.decay is not None:
        c, p = model.decay
        pair_form = 32.0 * c**gamma * eps * m ** (-gamma / p)
        worst_pair = 0.0
        fs = family.functions
        for i in range(len(fs)):
            for j in range(i + 1, len(fs)):
                worst_pair = max(worst_pair, power_norm(fs[i] - fs[j], 0.0) ** 2)
        results.append(
            CheckResult(
                "pairwise_l2_budget",
                worst_pair <= pair_form * rel,
                f"max ||f-g||_L2^2 = {worst_pair:.6g} vs 32 c^gamma eps m^(-gamma/p) = {pair_form:.6g}",
            )
        )
    return results


# ---------------------------------------------------------------------------
# information quantities and the testing bound


def noise_level(sigma: float, B: float) -> float:
    """Effective Gaussian noise level min(sigma, B) used in KL computations."""
    if not (sigma > 0.0 and B > 0.0):
        raise ValueError("sigma and B must be positive")
    return min(sigma, B)


def kl_divergence(
    f: CoefficientVector, g: CoefficientVector, n: int, sigma_tilde: float
) -> float:
    """KL divergence of n-sample Gaussian regression measures.

    K(P_f^n, P_g^n) = n / (2 sigma_tilde^2) * ||f - g||_L2^2.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not sigma_tilde > 0.0:
        raise ValueError("sigma_tilde must be positive")
    return n / (2.0 * sigma_tilde**2) * power_norm(f - g, 0.0) ** 2


def lower_bound_value(m_alternatives: int, alpha_star: float) -> tuple[float, float]:
    """Floor on the max error probability of any test among M+1 hypotheses.

    Returns (raw, clamped) where

        raw = sqrt(M) / (1 + sqrt(M)) * (1 - 3 alpha_star / log M - 1 / (2 log M))

    with the natural logarithm, and clamped = max(0, raw).
    """
    if m_alternatives < 2:
        raise ValueError("need at least 2 alternatives")
    if alpha_star < 0.0:
        raise ValueError("alpha_star must be non-negative")
    root = math.sqrt(m_alternatives)
    log_m = math.log(m_alternatives)
    raw = root / (1.0 + root) * (1.0 - 3.0 * alpha_star / log_m - 1.0 / (2.0 * log_m))
    return raw, max(0.0, raw)


def lower_rate_exponent(beta, gamma, p, q, alpha):
    """Exponent of the minimax lower rate.

    (max(alpha, beta) - gamma) / (max(alpha, beta) + q - gamma (1 - q/p)),
    where q <= p is the lower eigenvalue-decay exponent.  Written with plain
    scalar arithmetic so exact types (fractions.Fraction) pass through.
    """
    if not (0 < q <= p <= alpha <= 1):
        raise ValueError("need 0 < q <= p <= alpha <= 1")
    if not (0 <= gamma < beta <= 2):
        raise ValueError("need 0 <= gamma < beta <= 2")
    if gamma > 1:
        raise ValueError("gamma must lie in [0, 1]")
    top = beta if beta > alpha else alpha
    return (top - gamma) / (top + q - gamma * (1 - q / p))


# ---------------------------------------------------------------------------
# eps -> code size coupling


def coupling_constants(
    c_lb: float,
    q: float,
    beta: float,
    gamma: float,
    alpha: float,
    bnorm_cap: float,
    linf_cap: float,
    embed_sq: float,
) -> tuple[float, float]:
    """Constants (C_v, u) of the coupling m(eps) = floor(C_v eps^(-u)).

    u = q / (max(alpha, beta) - gamma).  C_v is derived from the budget caps:
    the norm budget allows m <= (1/2) c_lb^q (bnorm_cap/32)^(q/(beta-gamma))
    * eps^(-q/(beta-gamma)); for gamma < alpha the sup budget allows
    m <= (1/2) c_lb^q (linf_cap/(32 A^2))^(q/(alpha-gamma)) * eps^(-q/(alpha-gamma));
    for gamma >= alpha the sup budget constrains eps alone, not m.
    """
    if not (0.0 < q and c_lb > 0.0):
        raise ValueError("need c_lb > 0 and q > 0")
    if not 0.0 <= gamma < beta:
        raise ValueError("need 0 <= gamma < beta")
    top = max(alpha, beta)
    u = q / (top - gamma)
    c1 = 0.5 * c_lb**q * (bnorm_cap / 32.0) ** (q / (beta - gamma))
    if gamma < alpha:
        c2 = 0.5 * c_lb**q * (linf_cap / (32.0 * embed_sq)) ** (q / (alpha - gamma))
        return min(c1, c2), u
    return c1, u


def code_parameters(eps: float, c_v: float, u: float) -> tuple[int, int]:
    """Code length and size for separation scale eps: m = floor(C_v eps^(-u)),
    target_M = ceil(2^(m/8)).  Requires the resulting m >= 8."""
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    m = math.floor(c_v * eps ** (-u))
    if m < 8:
        raise ValueError(f"eps too large: coupled code length m = {m} < 8")
    return m, math.ceil(2.0 ** (m / 8.0))


# ---------------------------------------------------------------------------
# the testing game


@dataclass(frozen=True)
class GameReport:
    per_hypothesis_error: list[float]
    max_error: float
    alpha_star: float
    floor_raw: float
    floor_clamped: float
    n: int
    lam: float
    trials: int
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "per_hypothesis_error": self.per_hypothesis_error,
            "max_error": self.max_error,
            "alpha_star": self.alpha_star,
            "floor_raw": self.floor_raw,
            "floor_clamped": self.floor_clamped,
            "n": self.n,
            "lambda": self.lam,
            "trials": self.trials,
            "seed": self.seed,
        }


def testing_game(
    model: SpectrumModel,
    family: PackingFamily,
    n: int,
    sigma_tilde: float,
    trials: int,
    seed: int = 0,
    lam: float | None = None,
) -> GameReport:
    """Simulate the hypothesis test behind the lower bound.

    For each hypothesis j the data are y = f_j(x) + sigma_tilde * noise with
    x uniform on [0, 1]; the learner fits the regularized solution and picks
    the family member closest in the gamma norm (ties resolved toward the
    lowest index).  Reports per-hypothesis error rates, their max, alpha_star
    (the mean KL divergence to hypothesis 0), and the theoretical floor.

    `lam` defaults to n^(-1/(1+p)) with p from the model's decay parameters.
    """
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be at least 1")
    if not sigma_tilde > 0.0:
        raise ValueError("sigma_tilde must be positive")
    if lam is None:
        p = model.decay[1] if model.decay is not None else decay_fit(model)[1]
        lam = float(n) ** (-1.0 / (1.0 + p))
    coef = np.stack([f.coefficients for f in family.functions])
    weights = family.model.eigenvalues ** (-family.gamma)
    n_hyp = coef.shape[0]
    errors = np.zeros(n_hyp, dtype=int)
    for j in range(n_hyp):
        for t in range(trials):
            rng = np.random.default_rng((seed, j, t))
            xs = rng.random(n)
            ys = eval_function(family.functions[j], xs) + sigma_tilde * rng.standard_normal(n)
            fitted = solver_fit(model, Dataset(xs=xs, ys=ys, seed=(seed, j, t)), lam)
            a_hat = extract_coefficients(fitted).coefficients
            dist_sq = ((coef - a_hat) ** 2 * weights).sum(axis=1)
            if int(np.argmin(dist_sq)) != j:
                errors[j] += 1
    kls = [
        kl_divergence(family.functions[j], family.functions[0], n, sigma_tilde)
        for j in range(1, n_hyp)
    ]
    alpha_star = float(np.mean(kls))
    raw, clamped = lower_bound_value(family.n_alternatives, alpha_star)
    rates = (errors / trials).tolist()
    return GameReport(
        per_hypothesis_error=rates,
        max_error=float(max(rates)),
        alpha_star=alpha_star,
        floor_raw=raw,
        floor_clamped=clamped,
        n=n,
        lam=float(lam),
        trials=trials,
        seed=seed,
    )
