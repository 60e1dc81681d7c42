"""Rate-verification experiments for the regularized spectral estimator.

Pipeline: synthesize a target of prescribed smoothness from the spectrum,
draw regression samples over a grid of sample sizes, fit with the scheduled
regularization, measure squared errors in a power norm, and compare the
fitted log-log slope with the theoretical exponent

    (beta - gamma) / (max(beta, alpha) + p).

The module also runs coverage experiments for the finite-sample oracle bound
and translates Sobolev/Besov-style smoothness parameters into the spectral
ones used here.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .checks import CheckResult, ensure_all
from .power_space import CoefficientVector, eval_function, power_norm
from .solver import (
    Dataset,
    extract_coefficients,
    oracle_bound,
    population_solution,
)
from .solver import fit as solver_fit
from .spectrum import SpectrumModel, embedding_constant

SCHEDULE_CASES = ("case1_log", "case2_plain")
CONSTANT_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)

# Relative mass the target may carry beyond the truncation level, measured in
# the norm the experiment reports errors in.
_TAIL_LIMIT = 1e-8


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one rate experiment."""

    beta: float
    p: float
    alpha: float
    gamma: float
    sigma: float
    n_grid: tuple[int, ...] = (64, 128, 256, 512, 1024, 2048, 4096, 8192)
    replications: int = 20
    schedule_case: str = "case2_plain"
    seed: int = 0
    delta: float = 0.5
    scale: float = 1.0
    slope_tol: float = 0.15
    sweep_constants: bool = False
    # Fixed regularization for control runs; None means use the schedule.
    lambda_override: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))


def validate_model(model: SpectrumModel, config: ExperimentConfig) -> list[CheckResult]:
    """Check the standing assumptions linking the model and the experiment."""
    checks = []
    ordered = 0.0 < config.p <= config.alpha <= 1.0
    checks.append(
        CheckResult(
            "parameter_ordering",
            ordered,
            f"0 < p={config.p} <= alpha={config.alpha} <= 1",
        )
    )
    norms_ok = 0.0 <= config.gamma < config.beta <= 2.0 and config.gamma <= 1.0
    checks.append(
        CheckResult(
            "norm_parameters",
            norms_ok,
            f"0 <= gamma={config.gamma} < beta={config.beta} <= 2, gamma <= 1",
        )
    )
    checks.append(
        CheckResult(
            "decay_declared",
            model.decay is not None,
            "model carries exact power-law decay parameters",
        )
    )
    if model.decay is not None:
        c, p_model = model.decay
        idx = np.arange(1, model.truncation + 1, dtype=float)
        envelope = c * idx ** (-1.0 / config.p)
        worst = float((model.eigenvalues / envelope).max())
        checks.append(
            CheckResult(
                "eigenvalue_decay",
                p_model <= config.p * (1.0 + 1e-12) and worst <= 1.0 + 1e-12,
                f"mu_i <= {c} * i^(-1/{config.p}); max ratio {worst:.6g}",
            )
        )
    if ordered:
        a_const = embedding_constant(model, config.alpha)
        checks.append(
            CheckResult(
                "embedding_constant_finite",
                math.isfinite(a_const),
                f"A = {a_const:.6g} at alpha = {config.alpha}",
            )
        )
    checks.append(
        CheckResult(
            "noise_moment",
            config.sigma >= 0.0,
            f"Gaussian noise, sigma={config.sigma}: moment condition holds with B = sigma"
            " (sigma = 0 is the noiseless control case)",
        )
    )
    grid_ok = (
        len(config.n_grid) >= 2
        and all(n >= 2 for n in config.n_grid)
        and all(b > a for a, b in zip(config.n_grid, config.n_grid[1:]))
        and config.replications >= 1
    )
    checks.append(
        CheckResult("sample_grid", grid_ok, f"n_grid={config.n_grid}, replications={config.replications}")
    )
    lam_ok = config.lambda_override is None or config.lambda_override > 0.0
    checks.append(
        CheckResult(
            "target_parameters",
            config.delta > 0.0 and config.scale >= 0.0 and config.slope_tol > 0.0 and lam_ok,
            f"delta={config.delta}, scale={config.scale}, slope_tol={config.slope_tol},"
            f" lambda_override={config.lambda_override}",
        )
    )
    case_ok = config.schedule_case in SCHEDULE_CASES
    if case_ok and norms_ok and ordered:
        required = "case1_log" if config.beta <= config.alpha else "case2_plain"
        case_ok = config.schedule_case == required
        detail = f"schedule {config.schedule_case}; regime requires {required}"
    else:
        detail = f"schedule {config.schedule_case} must be one of {SCHEDULE_CASES}"
    checks.append(CheckResult("schedule_case", case_ok, detail))
    return checks


def synthesize_target(
    model: SpectrumModel,
    beta: float,
    delta: float,
    scale: float = 1.0,
    check_gamma: float | None = None,
) -> CoefficientVector:
    """Target with coefficients a_i = scale * i^(-beta/(2p) - 1/2 - delta).

    The margin delta > 0 makes the beta power norm finite.  When check_gamma
    is given, the relative tail of the squared gamma norm beyond the
    truncation (estimated by extending the decay law to 2T) must stay below
    1e-8, otherwise the target is rejected.  scale = 0 gives the zero target
    used by degenerate control runs.
    """
    if model.decay is None:
        raise ValueError("synthesize_target requires decay parameters on the model")
    if not 0.0 < beta <= 2.0:
        raise ValueError("beta must lie in (0, 2]")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if scale < 0.0:
        raise ValueError("scale must be non-negative")
    _, p = model.decay
    idx = np.arange(1, model.truncation + 1, dtype=float)
    a = scale * idx ** (-beta / (2.0 * p) - 0.5 - delta)
    if check_gamma is not None:
        frac = target_tail_fraction(model, beta, delta, scale, check_gamma)
        if frac > _TAIL_LIMIT:
            raise ValueError(
                f"target tail mass {frac:.3e} in the gamma={check_gamma} norm exceeds {_TAIL_LIMIT}"
            )
    return CoefficientVector(a, model)


def target_tail_fraction(
    model: SpectrumModel, beta: float, delta: float, scale: float, gamma: float
) -> float:
    """Relative squared-gamma-norm mass beyond T, via the 2T extension."""
    if model.decay is None:
        raise ValueError("tail estimation requires decay parameters on the model")
    c, p = model.decay
    t = model.truncation
    idx = np.arange(1, 2 * t + 1, dtype=float)
    a = scale * idx ** (-beta / (2.0 * p) - 0.5 - delta)
    terms = a**2 * (c * idx ** (-1.0 / p)) ** (-gamma)
    total = float(terms.sum())
    if total == 0.0:
        return 0.0
    head = float(terms[:t].sum())
    return (total - head) / total


def sample_dataset(
    model: SpectrumModel, f_star: CoefficientVector, n: int, sigma: float, seed
) -> Dataset:
    """n points uniform on [0, 1], responses f_star(x) + sigma * N(0, 1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    rng = np.random.default_rng(seed)
    xs = rng.random(n)
    ys = eval_function(f_star, xs) + sigma * rng.standard_normal(n)
    return Dataset(xs=xs, ys=ys, seed=seed)


def lambda_schedule(n, config: ExperimentConfig, constant: float = 1.0) -> float:
    """Scheduled regularization at (real-valued) sample size n >= 2.

    case1_log:   constant * (log n / n)^(1 / (alpha + p))
    case2_plain: constant * n^(-1 / (beta + p))
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    n = float(n)
    if config.schedule_case == "case1_log":
        return constant * (math.log(n) / n) ** (1.0 / (config.alpha + config.p))
    if config.schedule_case == "case2_plain":
        return constant * n ** (-1.0 / (config.beta + config.p))
    raise ValueError(f"unknown schedule case {config.schedule_case!r}")


def theoretical_exponent(beta, gamma, p, alpha):
    """Upper-rate exponent (beta - gamma) / (max(beta, alpha) + p).

    Errors decay like n^(-exponent) (with a log factor when beta <= alpha).
    Plain scalar arithmetic, so fractions.Fraction inputs stay exact.
    Raises when gamma >= beta: no decay is claimed there.
    """
    _check_exponent_parameters(beta, gamma, p, alpha)
    if gamma >= beta:
        raise ValueError("theoretical_exponent requires gamma < beta")
    return (beta - gamma) / (max(beta, alpha) + p)


def table_exponent(beta, gamma, p, alpha):
    """Tabular form max(0, beta - gamma) / (max(beta, alpha) + p).

    Identical to theoretical_exponent for gamma < beta and 0 otherwise,
    matching the convention used in summary tables of rate exponents.
    """
    _check_exponent_parameters(beta, gamma, p, alpha)
    num = beta - gamma
    if num <= 0:
        return num - num  # zero in the caller's numeric type, never -0.0
    return num / (max(beta, alpha) + p)


def _check_exponent_parameters(beta, gamma, p, alpha):
    if not (0 < p <= alpha <= 1):
        raise ValueError("need 0 < p <= alpha <= 1")
    if not (0 <= gamma <= 1):
        raise ValueError("need 0 <= gamma <= 1")
    if not (0 < beta <= 2):
        raise ValueError("need 0 < beta <= 2")


def besov_translate(r, s, t, d=1):
    """Map Sobolev-scale parameters to spectral ones: (p, beta, gamma).

    For an order-r Sobolev space on a d-dimensional domain with target
    smoothness s measured in the order-t norm, the spectral parameters are
    p = d/(2r), beta = s/r, gamma = t/r.  Requires r > d/2 and r > s > t >= 0.
    Plain scalar arithmetic, exact over fractions.Fraction.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    if not 2 * r > d:
        raise ValueError("need r > d/2")
    if not (r > s > t and t >= 0):
        raise ValueError("need r > s > t >= 0")
    return d / (2 * r), s / r, t / r


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class RateReport:
    """Outcome of one rate sweep; JSON-ready via to_json_dict()."""

    config: dict
    cells: list = field(repr=False)
    aggregates: list
    lambdas: list
    slope: float | None
    exponent: float
    slope_tol: float
    passed: bool
    degenerate: bool
    tail_fraction: float
    gamma: float
    schedule_case: str
    open_regime_note: str | None = None
    constant_sweep: dict | None = None

    def to_json_dict(self) -> dict:
        return asdict(self)


def _cell_seed(config_seed: int, n_index: int, replication: int) -> tuple[int, int, int]:
    return (config_seed, n_index, replication)


def _run_cell(model, f_star, config, n, n_index, replication, lam) -> float:
    data = sample_dataset(model, f_star, n, config.sigma, _cell_seed(config.seed, n_index, replication))
    fitted = solver_fit(model, data, lam)
    return power_norm(extract_coefficients(fitted) - f_star, config.gamma) ** 2


def _cell_star(args):
    return _run_cell(*args)


def _fit_slope(n_grid, means, schedule_case):
    """Slope of log mean error over the upper half of the n grid.

    Regressor: log n for the plain schedule, log(n / log n) for the log one,
    so the fitted slope approximates minus the exponent in both cases.
    Returns None when the window has fewer than two points or a mean in it is
    zero (degenerate data).
    """
    half = len(n_grid) // 2
    ns = np.asarray(n_grid[half:], dtype=float)
    ys = np.asarray(means[half:], dtype=float)
    if ys.size < 2 or np.any(ys <= 0.0):
        return None
    if schedule_case == "case1_log":
        xs = np.log(ns / np.log(ns))
    else:
        xs = np.log(ns)
    slope, _ = np.polyfit(xs, np.log(ys), 1)
    return float(slope)


def run_sweep(
    model: SpectrumModel,
    config: ExperimentConfig,
    jobs: int = 1,
    error_hook=None,
) -> RateReport:
    """Run the full (n, replication) grid and compare slope with theory.

    Cells are independent tasks seeded by (seed, n_index, replication), so
    serial and parallel execution produce identical reports.  `error_hook`
    replaces the measured squared error with hook(n, replication); it is a
    diagnostic device for exercising the slope machinery and forces serial
    execution.  config.lambda_override pins the regularization across the
    grid for control runs instead of following the schedule.
    """
    ensure_all(validate_model(model, config), "run_sweep")
    f_star = synthesize_target(model, config.beta, config.delta, config.scale, check_gamma=config.gamma)
    tail = target_tail_fraction(model, config.beta, config.delta, config.scale, config.gamma)
    exponent = float(theoretical_exponent(config.beta, config.gamma, config.p, config.alpha))

    constants = CONSTANT_GRID if config.sweep_constants else (1.0,)
    per_constant = {}
    for constant in constants:
        if config.lambda_override is not None:
            lambdas = [config.lambda_override] * len(config.n_grid)
        else:
            lambdas = [lambda_schedule(n, config, constant) for n in config.n_grid]
        errors = _collect_cells(model, f_star, config, lambdas, jobs, error_hook)
        per_constant[constant] = (lambdas, errors)

    lambdas, errors = per_constant[1.0]
    cells = []
    aggregates = []
    means = []
    for i, n in enumerate(config.n_grid):
        row = [errors[(i, r)] for r in range(config.replications)]
        for r, err in enumerate(row):
            cells.append({"n": n, "replication": r, "lambda": lambdas[i], "sq_error": err})
        arr = np.asarray(row)
        means.append(float(arr.mean()))
        aggregates.append(
            {
                "n": n,
                "lambda": lambdas[i],
                "mean_sq_error": float(arr.mean()),
                "median_sq_error": float(np.median(arr)),
                "q90_sq_error": float(np.quantile(arr, 0.9)),
            }
        )
    slope = _fit_slope(config.n_grid, means, config.schedule_case)
    degenerate = slope is None
    passed = True if degenerate else abs(slope + exponent) <= config.slope_tol

    constant_sweep = None
    if config.sweep_constants:
        slopes = {}
        for constant, (clams, cerrs) in per_constant.items():
            cmeans = [
                float(np.mean([cerrs[(i, r)] for r in range(config.replications)]))
                for i in range(len(config.n_grid))
            ]
            slopes[constant] = _fit_slope(config.n_grid, cmeans, config.schedule_case)
        scored = {c: s for c, s in slopes.items() if s is not None}
        best = min(scored, key=lambda c: abs(scored[c] + exponent)) if scored else None
        constant_sweep = {
            "slopes": {str(c): slopes[c] for c in slopes},
            "best_constant": best,
            "best_slope": None if best is None else scored[best],
        }

    note = None
    if config.beta <= config.alpha and config.alpha == config.p:
        note = (
            "regime beta <= alpha = p: sharpness of the upper rate is an open "
            "question; interpret the comparison with care"
        )
    return RateReport(
        config=asdict(config),
        cells=cells,
        aggregates=aggregates,
        lambdas=lambdas,
        slope=slope,
        exponent=exponent,
        slope_tol=config.slope_tol,
        passed=bool(passed),
        degenerate=degenerate,
        tail_fraction=tail,
        gamma=config.gamma,
        schedule_case=config.schedule_case,
        open_regime_note=note,
        constant_sweep=constant_sweep,
    )


def _collect_cells(model, f_star, config, lambdas, jobs, error_hook):
    tasks = [
        (model, f_star, config, n, i, r, lambdas[i])
        for i, n in enumerate(config.n_grid)
        for r in range(config.replications)
    ]
    keys = [(i, r) for i, n in enumerate(config.n_grid) for r in range(config.replications)]
    if error_hook is not None:
        return {(i, r): float(error_hook(config.n_grid[i], r)) for i, r in keys}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(_cell_star, tasks, chunksize=1))
    else:
        values = [_run_cell(*t) for t in tasks]
    return dict(zip(keys, values))


# ---------------------------------------------------------------------------
# oracle coverage


@dataclass(frozen=True)
class CoverageReport:
    violation_rate: float
    bound: float
    n0: float
    n: int
    lam: float
    tau: float
    trials: int
    target: float
    slack: float
    passed: bool

    def to_json_dict(self) -> dict:
        return asdict(self)


def oracle_coverage(
    model: SpectrumModel,
    config: ExperimentConfig,
    tau: float,
    trials: int,
    n: int | None = None,
    lam: float | None = None,
    seed: int | None = None,
    bound_scale: float = 1.0,
) -> CoverageReport:
    """Estimate how often the oracle bound on the estimation error fails.

    Simulates `trials` datasets of size n (default: the largest grid entry),
    fits each, and counts violations of the squared gamma-norm bound against
    the population solution.  Requires n >= n0 from the bound; raises
    otherwise, naming n0.  The violation rate is compared with 4 e^(-tau)
    plus three binomial standard errors.  `bound_scale` rescales the bound
    and exists for wiring tests.
    """
    if tau < 1.0:
        raise ValueError("tau must be at least 1")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    ensure_all(validate_model(model, config), "oracle_coverage")
    if n is None:
        n = max(config.n_grid)
    if lam is None:
        lam = config.lambda_override if config.lambda_override is not None else lambda_schedule(n, config)
    if seed is None:
        seed = config.seed
    f_star = synthesize_target(model, config.beta, config.delta, config.scale, check_gamma=config.gamma)
    bound, n0 = oracle_bound(
        model,
        f_star,
        lam,
        n,
        tau,
        gamma=config.gamma,
        alpha=config.alpha,
        sigma=config.sigma,
        B=config.sigma,  # Gaussian noise: moment condition holds with B = sigma
    )
    if n < n0:
        raise ValueError(f"n = {n} is below the oracle threshold n0 = {n0:.3f}")
    scaled = bound * bound_scale
    f_lam = population_solution(f_star, lam)
    violations = 0
    for t in range(trials):
        data = sample_dataset(model, f_star, n, config.sigma, (seed, t))
        fitted = solver_fit(model, data, lam)
        err = power_norm(extract_coefficients(fitted) - f_lam, config.gamma) ** 2
        if err > scaled:
            violations += 1
    target = min(1.0, 4.0 * math.exp(-tau))
    slack = 3.0 * math.sqrt(target * (1.0 - target) / trials)
    rate = violations / trials
    return CoverageReport(
        violation_rate=rate,
        bound=scaled,
        n0=n0,
        n=int(n),
        lam=float(lam),
        tau=float(tau),
        trials=trials,
        target=target,
        slack=slack,
        passed=rate <= target + slack,
    )
