"""Plain-text key=value configuration files.

Format: one `key = value` pair per line; `#` starts a comment; blank lines
are skipped.  A spectrum is given either by decay parameters (keys c, p, T)
or by explicit eigenvalues, one bare number per line.  One experiment per
file.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .rates import SCHEDULE_CASES, ExperimentConfig
from .spectrum import COSINE_FAMILY, SpectrumModel, power_law_spectrum

SPECTRUM_KEYS = {"family", "T", "c", "p"}
EXPERIMENT_KEYS = {
    "beta",
    "alpha",
    "gamma",
    "sigma",
    "delta",
    "scale",
    "n_grid",
    "replications",
    "schedule_case",
    "seed",
    "slope_tol",
    "sweep_constants",
    "lambda_override",
}
LOWER_BOUND_KEYS = {
    "m",
    "eps",
    "gamma",
    "beta",
    "alpha",
    "sigma",
    "B",
    "n",
    "trials",
    "seed",
    "bnorm_cap",
    "linf_cap",
    "run_game",
}


def parse_kv_file(path) -> tuple[dict[str, str], list[float]]:
    """Read key=value pairs and bare numeric lines from a config file."""
    pairs: dict[str, str] = {}
    bare: list[float] = []
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not key or not value:
                raise ConfigError(f"{path}:{lineno}: malformed key=value line {raw.strip()!r}")
            if key in pairs:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            pairs[key] = value
        else:
            try:
                bare.append(float(line))
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: expected key=value or a bare number, got {raw.strip()!r}")
    return pairs, bare


def _get_float(pairs, key, default=None):
    if key not in pairs:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return float(pairs[key])
    except ValueError:
        raise ConfigError(f"key {key!r} must be a number, got {pairs[key]!r}")


def _get_int(pairs, key, default=None):
    if key not in pairs:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return int(pairs[key])
    except ValueError:
        raise ConfigError(f"key {key!r} must be an integer, got {pairs[key]!r}")


def _get_bool(pairs, key, default):
    if key not in pairs:
        return default
    token = pairs[key].lower()
    if token in ("true", "yes", "1"):
        return True
    if token in ("false", "no", "0"):
        return False
    raise ConfigError(f"key {key!r} must be a boolean, got {pairs[key]!r}")


def spectrum_from_pairs(pairs: dict[str, str], bare: list[float]) -> SpectrumModel:
    family = pairs.get("family", COSINE_FAMILY)
    if bare:
        if "c" in pairs or "p" in pairs:
            raise ConfigError("give either decay parameters (c, p) or an eigenvalue list, not both")
        mu = np.asarray(bare, dtype=float)
        if "T" in pairs and _get_int(pairs, "T") != mu.size:
            raise ConfigError(f"T = {pairs['T']} disagrees with {mu.size} listed eigenvalues")
        try:
            return SpectrumModel(eigenvalues=mu, family=family)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    c = _get_float(pairs, "c", 1.0)
    p = _get_float(pairs, "p")
    t = _get_int(pairs, "T", 1024)
    try:
        model = power_law_spectrum(c=c, p=p, truncation=t)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if family != COSINE_FAMILY:
        raise ConfigError(f"unknown eigenfunction family {family!r}")
    return model


def spectrum_from_file(path) -> SpectrumModel:
    pairs, bare = parse_kv_file(path)
    unknown = set(pairs) - SPECTRUM_KEYS
    if unknown:
        raise ConfigError(f"unknown spectrum keys: {sorted(unknown)}")
    return spectrum_from_pairs(pairs, bare)


def experiment_from_file(path) -> tuple[SpectrumModel, ExperimentConfig]:
    """Load the spectrum and the experiment description from one file."""
    pairs, bare = parse_kv_file(path)
    unknown = set(pairs) - SPECTRUM_KEYS - EXPERIMENT_KEYS
    if unknown:
        raise ConfigError(f"unknown experiment keys: {sorted(unknown)}")
    model = spectrum_from_pairs({k: v for k, v in pairs.items() if k in SPECTRUM_KEYS}, bare)
    if model.decay is None:
        raise ConfigError("rate experiments need decay parameters (c, p), not an eigenvalue list")
    n_grid = ExperimentConfig.n_grid
    if "n_grid" in pairs:
        try:
            n_grid = tuple(int(tok.strip()) for tok in pairs["n_grid"].split(",") if tok.strip())
        except ValueError:
            raise ConfigError(f"n_grid must be comma-separated integers, got {pairs['n_grid']!r}")
        if not n_grid:
            raise ConfigError("n_grid must not be empty")
    schedule_case = pairs.get("schedule_case", "case2_plain")
    if schedule_case not in SCHEDULE_CASES:
        raise ConfigError(f"schedule_case must be one of {SCHEDULE_CASES}, got {schedule_case!r}")
    config = ExperimentConfig(
        beta=_get_float(pairs, "beta"),
        p=model.decay[1],
        alpha=_get_float(pairs, "alpha"),
        gamma=_get_float(pairs, "gamma"),
        sigma=_get_float(pairs, "sigma"),
        n_grid=n_grid,
        replications=_get_int(pairs, "replications", 20),
        schedule_case=schedule_case,
        seed=_get_int(pairs, "seed", 0),
        delta=_get_float(pairs, "delta", 0.5),
        scale=_get_float(pairs, "scale", 1.0),
        slope_tol=_get_float(pairs, "slope_tol", 0.15),
        sweep_constants=_get_bool(pairs, "sweep_constants", False),
        lambda_override=_get_float(pairs, "lambda_override") if "lambda_override" in pairs else None,
    )
    return model, config


def lower_bound_from_file(path) -> tuple[SpectrumModel, dict]:
    """Load the spectrum and lower-bound run settings from one file."""
    pairs, bare = parse_kv_file(path)
    unknown = set(pairs) - SPECTRUM_KEYS - LOWER_BOUND_KEYS
    if unknown:
        raise ConfigError(f"unknown lower-bound keys: {sorted(unknown)}")
    model = spectrum_from_pairs({k: v for k, v in pairs.items() if k in SPECTRUM_KEYS}, bare)
    settings = {
        "m": _get_int(pairs, "m", 16),
        "eps": _get_float(pairs, "eps", 0.01),
        "gamma": _get_float(pairs, "gamma", 0.0),
        "beta": _get_float(pairs, "beta", 1.0),
        "alpha": _get_float(pairs, "alpha", 0.5),
        "sigma": _get_float(pairs, "sigma", 0.3),
        "B": _get_float(pairs, "B", 0.3),
        "n": _get_int(pairs, "n", 128),
        "trials": _get_int(pairs, "trials", 0),
        "seed": _get_int(pairs, "seed", 0),
        "bnorm_cap": _get_float(pairs, "bnorm_cap", 0.0) or None,
        "linf_cap": _get_float(pairs, "linf_cap", 0.0) or None,
        "run_game": _get_bool(pairs, "run_game", False),
    }
    if settings["m"] > 0 and model.truncation < 2 * settings["m"]:
        raise ConfigError(f"truncation {model.truncation} below 2m = {2 * settings['m']}")
    return model, settings
