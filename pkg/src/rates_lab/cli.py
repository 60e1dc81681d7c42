"""Command-line front end.

Usage:
    rates-lab --command rates --config cfg.txt --out reports/ [--seed N] [--jobs N]

Commands: rates (run a sweep and compare slope with theory), lower-bound
(build and verify a packing family, optionally play the testing game),
lemmas (run the invariant suites), kernel-info (describe a spectrum).

Exit codes: 0 success, 1 failed invariants or criteria, 2 usage or config
errors.  --jobs falls back to the environment variable RATES_LAB_JOBS.
Reports are JSON plus CSV, named by UTC timestamp and seed, and never
overwritten (append-only per output directory).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import diagnostics
from .checks import failing
from .configio import experiment_from_file, lower_bound_from_file, spectrum_from_file
from .errors import ConfigError, RatesLabError
from .lower_bound import (
    budget_check,
    build_alternatives,
    gilbert_varshamov,
    kl_divergence,
    lower_bound_value,
    noise_level,
    testing_game,
)
from .power_space import power_norm
from .rates import run_sweep, table_exponent
from .solver import effective_dimension
from .spectrum import decay_fit, embedding_constant

COMMANDS = ("rates", "lower-bound", "lemmas", "kernel-info")
JOBS_ENV_VAR = "RATES_LAB_JOBS"


@dataclass(frozen=True)
class RunManifest:
    """Resolved invocation: command, config path, output dir, seed, jobs."""

    command: str
    config_path: str
    out_dir: str | None
    seed: int | None
    jobs: int

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"command must be one of {COMMANDS}, got {self.command!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.command in ("rates", "lower-bound") and not self.out_dir:
            raise ConfigError(f"--out is required for the {self.command} command")


def _resolve_jobs(flag_value: int | None) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get(JOBS_ENV_VAR)
    if env is None:
        return 1
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"{JOBS_ENV_VAR} must be an integer, got {env!r}")


def manifest_from_args(argv) -> RunManifest:
    parser = argparse.ArgumentParser(prog="rates-lab", add_help=True)
    parser.add_argument("--command", required=True, choices=COMMANDS)
    parser.add_argument("--config", required=True, metavar="PATH")
    parser.add_argument("--out", default=None, metavar="DIR")
    parser.add_argument("--seed", type=int, default=None, metavar="N")
    parser.add_argument("--jobs", type=int, default=None, metavar="N")
    ns = parser.parse_args(argv)
    return RunManifest(
        command=ns.command,
        config_path=ns.config,
        out_dir=ns.out,
        seed=ns.seed,
        jobs=_resolve_jobs(ns.jobs),
    )


# ---------------------------------------------------------------------------
# report files


def _report_paths(out_dir: str, seed, stem: str) -> tuple[Path, Path]:
    """Timestamped, seed-tagged, append-only file pair (.json, .csv)."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    base = f"{stamp}_seed{seed}_{stem}"
    candidate = base
    counter = 1
    while (directory / f"{candidate}.json").exists() or (directory / f"{candidate}.csv").exists():
        counter += 1
        candidate = f"{base}-{counter}"
    return directory / f"{candidate}.json", directory / f"{candidate}.csv"


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue())


# ---------------------------------------------------------------------------
# tables


def render_tables(report_paths: list) -> str:
    """Aligned text table, one row per rate report file."""
    reports = []
    for path in report_paths:
        try:
            with open(path) as fh:
                reports.append(json.load(fh))
        except OSError as exc:
            raise ConfigError(f"cannot read report {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"report {path} is not valid JSON: {exc}") from exc
    return _table_from_reports(reports)


def _table_from_reports(reports: list[dict]) -> str:
    header = ["beta", "p", "alpha", "gamma", "schedule", "slope", "exponent", "pass"]
    rows = []
    for rep in reports:
        cfg = rep["config"]
        slope = rep["slope"]
        rows.append(
            [
                f"{cfg['beta']:g}",
                f"{cfg['p']:g}",
                f"{cfg['alpha']:g}",
                f"{cfg['gamma']:g}",
                rep["schedule_case"],
                "n/a" if slope is None else f"{slope:+.4f}",
                f"-{rep['exponent']:.4f}",
                "yes" if rep["passed"] else "NO",
            ]
        )
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i]) for i in range(len(header))]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header))]
    for r in rows:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(header))))
    return "\n".join(lines)


def render_tables_csv(report_paths: list) -> str:
    """CSV twin of render_tables."""
    text = render_tables(report_paths)
    lines = text.splitlines()
    buf = io.StringIO()
    writer = csv.writer(buf)
    for line in lines:
        writer.writerow(line.split())
    return buf.getvalue()


def exponent_table(betas, p, alpha) -> str:
    """Rate exponents max(0, beta-gamma)/(max(beta, alpha)+p) for gamma in {0, alpha, 1}."""
    header = ["beta", "gamma=0", "gamma=alpha", "gamma=1"]
    rows = []
    for beta in betas:
        cells = [f"{beta:g}"]
        for gamma in (0.0, alpha, 1.0):
            cells.append(f"{float(table_exponent(beta, gamma, p, alpha)):.6g}")
        rows.append(cells)
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) for i in range(len(header))]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header))]
    for r in rows:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(header))))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands


def _cmd_rates(manifest: RunManifest) -> int:
    model, config = experiment_from_file(manifest.config_path)
    if manifest.seed is not None:
        config = dataclasses.replace(config, seed=manifest.seed)
    report = run_sweep(model, config, jobs=manifest.jobs)
    json_path, csv_path = _report_paths(manifest.out_dir, config.seed, "rates")
    _write_json(json_path, report.to_json_dict())
    _write_csv(
        csv_path,
        ["n", "replication", "lambda", "sq_error"],
        [[c["n"], c["replication"], repr(c["lambda"]), repr(c["sq_error"])] for c in report.cells],
    )
    print(_table_from_reports([report.to_json_dict()]))
    if report.tail_fraction > 0:
        print(f"target tail fraction (gamma norm): {report.tail_fraction:.3e}")
    if report.open_regime_note:
        print(f"note: {report.open_regime_note}")
    print(f"report: {json_path}")
    return 0 if report.passed else 1


def _cmd_lower_bound(manifest: RunManifest) -> int:
    model, s = lower_bound_from_file(manifest.config_path)
    seed = manifest.seed if manifest.seed is not None else s["seed"]
    code = gilbert_varshamov(s["m"], seed=seed)
    family = build_alternatives(model, code, s["eps"], s["gamma"])
    checks = budget_check(family, s["beta"], s["alpha"], s["bnorm_cap"], s["linf_cap"])
    # separation: pairwise squared gamma-norm distance of distinct members >= 4 eps
    min_sep = min(
        power_norm(family.functions[i] - family.functions[j], s["gamma"]) ** 2
        for i in range(len(family.functions))
        for j in range(i + 1, len(family.functions))
    )
    separation_ok = min_sep >= 4.0 * s["eps"] * (1.0 - 1e-12)
    sig = noise_level(s["sigma"], s["B"])
    kls = [
        kl_divergence(f, family.functions[0], s["n"], sig) for f in family.functions[1:]
    ]
    alpha_star = float(np.mean(kls))
    raw, clamped = lower_bound_value(family.n_alternatives, alpha_star)
    payload = {
        "family": family.to_json_dict(),
        "separation_min_sq": min_sep,
        "separation_target": 4.0 * s["eps"],
        "separation_ok": separation_ok,
        "budget_checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
        "alpha_star": alpha_star,
        "floor_raw": raw,
        "floor_clamped": clamped,
        "n": s["n"],
        "sigma_tilde": sig,
        "seed": seed,
    }
    rows = [["separation_min_sq", repr(min_sep)], ["alpha_star", repr(alpha_star)], ["floor", repr(clamped)]]
    if s["run_game"] and s["trials"] > 0:
        game = testing_game(model, family, s["n"], sig, s["trials"], seed=seed)
        payload["game"] = game.to_json_dict()
        rows.append(["game_max_error", repr(game.max_error)])
        print(f"testing game: max error {game.max_error:.3f}, floor {game.floor_clamped:.3f}")
    json_path, csv_path = _report_paths(manifest.out_dir, seed, "lower_bound")
    _write_json(json_path, payload)
    _write_csv(csv_path, ["quantity", "value"], rows)
    ok = separation_ok and not failing(checks)
    print(f"packing: {family.n_alternatives} alternatives, min separation {min_sep:.6g} (need {4 * s['eps']:.6g})")
    for c in checks:
        print(str(c))
    print(f"report: {json_path}")
    return 0 if ok else 1


def _cmd_lemmas(manifest: RunManifest) -> int:
    model = spectrum_from_file(manifest.config_path)
    suites = diagnostics.run_all(model)
    all_ok = True
    for name, checks in suites.items():
        good = sum(1 for c in checks if c.passed)
        print(f"{name}: {good}/{len(checks)} checks passed")
        for c in checks:
            if not c.passed:
                all_ok = False
                print(f"  {c}")
    if model.decay is not None:
        print()
        print(exponent_table(betas=(0.5, 1.0, 1.5, 2.0), p=model.decay[1], alpha=max(model.decay[1], 0.5)))
    return 0 if all_ok else 1


def _cmd_kernel_info(manifest: RunManifest) -> int:
    model = spectrum_from_file(manifest.config_path)
    mu = model.eigenvalues
    print(f"family: {model.family}")
    print(f"truncation: {model.truncation}")
    print(f"eigenvalues: mu_1 = {mu[0]:.6g}, mu_T = {mu[-1]:.6g}")
    if model.decay is not None:
        print(f"declared decay: mu_i = {model.decay[0]:g} * i^(-1/{model.decay[1]:g})")
    if model.truncation >= 4:
        c_fit, p_fit = decay_fit(model)
        print(f"fitted decay:   mu_i ~ {c_fit:.6g} * i^(-1/{p_fit:.6g})")
    for gamma in (0.25, 0.5, 0.75, 1.0):
        print(f"embedding constant at gamma={gamma}: {embedding_constant(model, gamma):.6g}")
    for lam in (1.0, 0.1, 0.01):
        print(f"effective dimension at lambda={lam}: {effective_dimension(model, lam):.6g}")
    return 0


def run(manifest: RunManifest) -> int:
    handler = {
        "rates": _cmd_rates,
        "lower-bound": _cmd_lower_bound,
        "lemmas": _cmd_lemmas,
        "kernel-info": _cmd_kernel_info,
    }[manifest.command]
    return handler(manifest)


def main(argv=None) -> int:
    try:
        manifest = manifest_from_args(argv)
        return run(manifest)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RatesLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
