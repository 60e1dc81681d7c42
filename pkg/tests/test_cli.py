"""Command-line interface: manifests, report files, tables, end-to-end runs."""

import csv
import io
import json
from datetime import datetime

import pytest

from rates_lab import cli
from rates_lab.errors import ConfigError


def write(tmp_path, text, name="config.txt"):
    path = tmp_path / name
    path.write_text(text)
    return path


SPECTRUM = "c = 1.0\np = 0.5\nT = 64\n"

# Noiseless quick sweep at the saturation smoothness beta = 2: the bias term
# decays exactly like lambda^2 = n^(-0.8), so the measured slope sits near the
# theoretical exponent even on a tiny grid.
QUICK = (
    "c = 1.0\np = 0.5\nT = 64\n"
    "beta = 2.0\nalpha = 0.5\ngamma = 0.0\nsigma = 0.0\ndelta = 0.25\n"
    "n_grid = 128, 256, 512\nreplications = 6\nschedule_case = case2_plain\n"
    "seed = 0\nslope_tol = 0.3\n"
)

LOWER = (
    "c = 1.0\np = 0.5\nT = 32\n"
    "m = 8\neps = 0.01\ngamma = 0.0\nbeta = 1.0\nalpha = 0.5\n"
    "sigma = 0.3\nB = 0.3\nn = 128\nseed = 0\n"
)


class TestManifest:
    def test_full_flags(self):
        manifest = cli.manifest_from_args(
            ["--command", "rates", "--config", "cfg.txt", "--out", "reports", "--seed", "3", "--jobs", "2"]
        )
        assert manifest == cli.RunManifest("rates", "cfg.txt", "reports", 3, 2)

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv(cli.JOBS_ENV_VAR, raising=False)
        manifest = cli.manifest_from_args(["--command", "lemmas", "--config", "cfg.txt"])
        assert manifest.jobs == 1
        assert manifest.seed is None
        assert manifest.out_dir is None

    def test_jobs_env_fallback(self, monkeypatch):
        monkeypatch.setenv(cli.JOBS_ENV_VAR, "3")
        manifest = cli.manifest_from_args(["--command", "lemmas", "--config", "cfg.txt"])
        assert manifest.jobs == 3

    def test_jobs_flag_beats_env(self, monkeypatch):
        monkeypatch.setenv(cli.JOBS_ENV_VAR, "3")
        manifest = cli.manifest_from_args(["--command", "lemmas", "--config", "cfg.txt", "--jobs", "2"])
        assert manifest.jobs == 2

    def test_jobs_env_must_be_integer(self, monkeypatch):
        monkeypatch.setenv(cli.JOBS_ENV_VAR, "many")
        with pytest.raises(ConfigError, match=cli.JOBS_ENV_VAR):
            cli.manifest_from_args(["--command", "lemmas", "--config", "cfg.txt"])

    def test_jobs_below_one_rejected(self):
        with pytest.raises(ConfigError, match="jobs"):
            cli.RunManifest("lemmas", "cfg.txt", None, None, 0)

    def test_unknown_command_rejected(self):
        with pytest.raises(ConfigError, match="command"):
            cli.RunManifest("train", "cfg.txt", None, None, 1)

    @pytest.mark.parametrize("command", ["rates", "lower-bound"])
    def test_out_required_for_report_commands(self, command):
        with pytest.raises(ConfigError, match="--out"):
            cli.RunManifest(command, "cfg.txt", None, None, 1)

    def test_out_optional_for_lemmas_and_kernel_info(self):
        cli.RunManifest("lemmas", "cfg.txt", None, None, 1)
        cli.RunManifest("kernel-info", "cfg.txt", None, None, 1)

    def test_argparse_rejects_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            cli.manifest_from_args(["--command", "train", "--config", "cfg.txt"])
        assert exc_info.value.code == 2
        capsys.readouterr()

    def test_argparse_requires_config(self, capsys):
        with pytest.raises(SystemExit):
            cli.manifest_from_args(["--command", "lemmas"])
        capsys.readouterr()


class TestReportPaths:
    def test_append_only_suffixes(self, tmp_path, monkeypatch):
        class FrozenDatetime:
            @staticmethod
            def now(tz):
                return datetime(2026, 1, 2, 3, 4, 5, tzinfo=tz)

        monkeypatch.setattr(cli, "datetime", FrozenDatetime)
        first_json, first_csv = cli._report_paths(str(tmp_path), 7, "rates")
        assert first_json.name == "20260102T030405Z_seed7_rates.json"
        assert first_csv.name == "20260102T030405Z_seed7_rates.csv"

        first_json.write_text("{}")
        second_json, second_csv = cli._report_paths(str(tmp_path), 7, "rates")
        assert second_json.name == "20260102T030405Z_seed7_rates-2.json"

        # a lone csv also blocks a candidate name
        second_csv.write_text("x")
        third_json, _ = cli._report_paths(str(tmp_path), 7, "rates")
        assert third_json.name == "20260102T030405Z_seed7_rates-3.json"

    def test_creates_output_directory(self, tmp_path):
        json_path, _ = cli._report_paths(str(tmp_path / "sub" / "dir"), 0, "rates")
        assert json_path.parent.is_dir()


class TestRenderTables:
    @staticmethod
    def report(slope=-0.5, passed=True):
        return {
            "config": {"beta": 1.0, "p": 0.5, "alpha": 0.5, "gamma": 0.0},
            "schedule_case": "case2_plain",
            "slope": slope,
            "exponent": 2.0 / 3.0,
            "passed": passed,
        }

    def test_single_row(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text(json.dumps(self.report()))
        lines = cli.render_tables([path]).splitlines()
        assert len(lines) == 2
        assert lines[0].split() == ["beta", "p", "alpha", "gamma", "schedule", "slope", "exponent", "pass"]
        assert lines[1].split() == ["1", "0.5", "0.5", "0", "case2_plain", "-0.5000", "-0.6667", "yes"]

    def test_missing_slope_and_failure_flag(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text(json.dumps(self.report(slope=None, passed=False)))
        row = cli.render_tables([path]).splitlines()[1].split()
        assert row[5] == "n/a"
        assert row[-1] == "NO"

    def test_empty_list_gives_header_only(self):
        assert cli.render_tables([]).splitlines() == [
            "beta  p  alpha  gamma  schedule  slope  exponent  pass"
        ]

    def test_missing_report_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            cli.render_tables([tmp_path / "absent.json"])

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            cli.render_tables([path])

    def test_csv_twin(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text(json.dumps(self.report()))
        rows = list(csv.reader(io.StringIO(cli.render_tables_csv([path]))))
        assert rows[0] == ["beta", "p", "alpha", "gamma", "schedule", "slope", "exponent", "pass"]
        assert rows[1][5] == "-0.5000"


class TestExponentTable:
    def test_known_cells(self):
        lines = cli.exponent_table(betas=(0.5, 1.0), p=0.5, alpha=0.5).splitlines()
        assert lines[0].split() == ["beta", "gamma=0", "gamma=alpha", "gamma=1"]
        assert lines[1].split() == ["0.5", "0.5", "0", "0"]
        assert lines[2].split() == ["1", "0.666667", "0.333333", "0"]


class TestKernelInfoCommand:
    def test_prints_summary(self, tmp_path, capsys):
        cfg = write(tmp_path, SPECTRUM)
        assert cli.main(["--command", "kernel-info", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "family: cosine_uniform_01" in out
        assert "truncation: 64" in out
        assert "declared decay" in out
        assert "fitted decay" in out
        assert "embedding constant at gamma=1.0" in out
        assert "effective dimension at lambda=0.01" in out

    def test_explicit_eigenvalues_have_no_declared_decay(self, tmp_path, capsys):
        cfg = write(tmp_path, "1.0\n0.5\n0.25\n0.125\n")
        assert cli.main(["--command", "kernel-info", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "declared decay" not in out
        assert "fitted decay" in out


class TestLemmasCommand:
    def test_all_suites_pass_on_power_law_model(self, tmp_path, capsys):
        cfg = write(tmp_path, SPECTRUM)
        assert cli.main(["--command", "lemmas", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        for name in ("approximation_error", "l2_linf", "sup_fraction", "codes", "effective_dimension"):
            assert f"{name}:" in out
        assert "checks passed" in out
        assert "gamma=alpha" in out

    def test_explicit_spectrum_skips_decay_suite_and_table(self, tmp_path, capsys):
        cfg = write(tmp_path, "1.0\n0.5\n0.25\n0.125\n")
        assert cli.main(["--command", "lemmas", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "effective_dimension" not in out
        assert "gamma=alpha" not in out


class TestRatesCommand:
    def test_quick_run_writes_reports(self, tmp_path, capsys):
        cfg = write(tmp_path, QUICK)
        out_dir = tmp_path / "reports"
        assert cli.main(["--command", "rates", "--config", str(cfg), "--out", str(out_dir)]) == 0
        captured = capsys.readouterr().out

        json_files = list(out_dir.glob("*_seed0_rates*.json"))
        assert len(json_files) == 1
        report = json.loads(json_files[0].read_text())
        assert report["passed"] is True
        assert report["config"]["seed"] == 0
        assert len(report["cells"]) == 18

        with json_files[0].with_suffix(".csv").open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["n", "replication", "lambda", "sq_error"]
        assert len(rows) == 19

        assert "schedule" in captured
        assert "report:" in captured
        assert "target tail fraction" in captured

    def test_repeat_runs_are_byte_identical(self, tmp_path, capsys):
        cfg = write(tmp_path, QUICK)
        dir_a, dir_b = tmp_path / "a", tmp_path / "b"
        assert cli.main(["--command", "rates", "--config", str(cfg), "--out", str(dir_a)]) == 0
        assert cli.main(["--command", "rates", "--config", str(cfg), "--out", str(dir_b)]) == 0
        capsys.readouterr()
        assert next(dir_a.glob("*.json")).read_text() == next(dir_b.glob("*.json")).read_text()

    def test_seed_flag_overrides_config(self, tmp_path, capsys):
        cfg = write(tmp_path, QUICK)
        out_dir = tmp_path / "reports"
        assert cli.main(["--command", "rates", "--config", str(cfg), "--out", str(out_dir), "--seed", "5"]) == 0
        capsys.readouterr()
        path = next(out_dir.glob("*.json"))
        assert "seed5" in path.name
        assert json.loads(path.read_text())["config"]["seed"] == 5

    def test_fixed_lambda_fails_slope_check(self, tmp_path, capsys):
        cfg = write(tmp_path, QUICK + "lambda_override = 0.05\n")
        out_dir = tmp_path / "reports"
        assert cli.main(["--command", "rates", "--config", str(cfg), "--out", str(out_dir)]) == 1
        assert "NO" in capsys.readouterr().out
        report = json.loads(next(out_dir.glob("*.json")).read_text())
        assert report["passed"] is False
        assert report["lambdas"] == [0.05, 0.05, 0.05]

    def test_missing_out_is_config_error(self, tmp_path, capsys):
        cfg = write(tmp_path, QUICK)
        assert cli.main(["--command", "rates", "--config", str(cfg)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_invalid_model_parameters_exit_one(self, tmp_path, capsys):
        cfg = write(tmp_path, QUICK.replace("beta = 2.0", "beta = 2.5"))
        assert cli.main(["--command", "rates", "--config", str(cfg), "--out", str(tmp_path / "r")]) == 1
        assert "norm_parameters" in capsys.readouterr().err

    def test_missing_config_file_exits_two(self, tmp_path, capsys):
        assert cli.main(["--command", "lemmas", "--config", str(tmp_path / "absent.txt")]) == 2
        assert "config error" in capsys.readouterr().err


class TestLowerBoundCommand:
    def test_builds_family_and_reports(self, tmp_path, capsys):
        cfg = write(tmp_path, LOWER)
        out_dir = tmp_path / "reports"
        assert cli.main(["--command", "lower-bound", "--config", str(cfg), "--out", str(out_dir)]) == 0
        out = capsys.readouterr().out
        assert "packing: 2 alternatives" in out
        assert "[PASS] norm_budget_closed_form" in out

        json_path = next(out_dir.glob("*_lower_bound*.json"))
        payload = json.loads(json_path.read_text())
        assert payload["separation_ok"] is True
        assert payload["separation_min_sq"] >= payload["separation_target"] * (1.0 - 1e-12)
        assert payload["floor_clamped"] >= 0.0
        assert payload["seed"] == 0
        assert [c["name"] for c in payload["budget_checks"]] == [
            "norm_budget_closed_form",
            "sup_budget_closed_form",
            "pairwise_l2_budget",
        ]
        assert all(c["passed"] for c in payload["budget_checks"])
        assert "game" not in payload

        with json_path.with_suffix(".csv").open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["quantity", "value"]
        assert [r[0] for r in rows[1:]] == ["separation_min_sq", "alpha_star", "floor"]

    def test_game_appended_when_requested(self, tmp_path, capsys):
        cfg = write(tmp_path, LOWER + "trials = 10\nrun_game = true\n")
        out_dir = tmp_path / "reports"
        assert cli.main(["--command", "lower-bound", "--config", str(cfg), "--out", str(out_dir)]) == 0
        assert "testing game: max error" in capsys.readouterr().out
        payload = json.loads(next(out_dir.glob("*.json")).read_text())
        assert payload["game"]["trials"] == 10
        assert payload["game"]["max_error"] >= 0.0

    def test_seed_flag_overrides_config(self, tmp_path, capsys):
        cfg = write(tmp_path, LOWER.replace("seed = 0\n", "seed = 3\n"))
        out_dir = tmp_path / "reports"
        assert cli.main(["--command", "lower-bound", "--config", str(cfg), "--out", str(out_dir), "--seed", "1"]) == 0
        capsys.readouterr()
        payload = json.loads(next(out_dir.glob("*seed1*.json")).read_text())
        assert payload["seed"] == 1
