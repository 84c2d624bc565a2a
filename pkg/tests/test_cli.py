import csv

import pytest
from click.testing import CliRunner

from adamlab.cli import main
from adamlab.records import CURVES_HEADER, RHO_HEADER, RUNS_HEADER, TRACE_HEADER


@pytest.fixture
def runner():
    return CliRunner()


SWEEP_CONFIG = """\
[problem]
kind = "logistic_regression"
n_samples = 64
dim = 4
batch_size = 8
seed = 3

[optimizer]
epsilon = 1e-8
weight_decay = 0.0
clip_norm = 1.0

[sweep]
learning_rates = [0.01, 0.1]
beta_pairs = [[0.9, 0.999]]
bias_correction = [true, false]
schedule_kind = ["constant"]
seeds = [0, 1]
steps = 40
"""


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestRunCommand:
    def test_writes_csvs(self, runner, tmp_path):
        result = runner.invoke(main, [
            "run", "--problem", "quadratic(dim=2,condition_number=5.0,seed=1)",
            "--lr", "0.05", "--steps", "50", "--seed", "3",
            "--out", str(tmp_path),
        ])
        assert result.exit_code == 0, result.output
        runs = read_rows(tmp_path / "runs.csv")
        assert runs[0] == RUNS_HEADER
        assert len(runs) == 2
        trace = read_rows(tmp_path / "trace.csv")
        assert trace[0] == TRACE_HEADER
        assert len(trace) > 2

    def test_bad_problem_is_config_error(self, runner, tmp_path):
        result = runner.invoke(main, [
            "run", "--problem", "nonsense(dim=2)", "--lr", "0.05",
            "--steps", "10", "--out", str(tmp_path),
        ])
        assert result.exit_code == 1
        assert "error" in result.output

    def test_bad_hyperparameter_is_config_error(self, runner, tmp_path):
        result = runner.invoke(main, [
            "run", "--problem", "quadratic(dim=2)", "--lr", "0.05",
            "--steps", "10", "--beta1", "1.5", "--out", str(tmp_path),
        ])
        assert result.exit_code == 1


class TestSweepCommand:
    def test_grid_and_summarize(self, runner, tmp_path):
        config = tmp_path / "sweep.toml"
        config.write_text(SWEEP_CONFIG)
        out = tmp_path / "out"
        result = runner.invoke(main, [
            "sweep", "--config", str(config), "--out", str(out),
            "--parallelism", "2",
        ])
        assert result.exit_code == 0, result.output
        runs = read_rows(out / "runs.csv")
        assert len(runs) == 1 + 2 * 2 * 2  # header + lr x flag x seed

        curves = tmp_path / "curves.csv"
        result = runner.invoke(main, [
            "summarize", "--runs", str(out / "runs.csv"), "--out", str(curves),
        ])
        assert result.exit_code == 0, result.output
        rows = read_rows(curves)
        assert rows[0] == CURVES_HEADER
        assert len(rows) == 1 + 4  # 2 flags x 2 lrs

    def test_unknown_key_rejected(self, runner, tmp_path):
        config = tmp_path / "sweep.toml"
        config.write_text(SWEEP_CONFIG + "\ntypo_key = 1\n")
        result = runner.invoke(main, ["sweep", "--config", str(config),
                                      "--out", str(tmp_path)])
        assert result.exit_code == 1
        assert "typo_key" in result.output

    def test_missing_table_rejected(self, runner, tmp_path):
        config = tmp_path / "sweep.toml"
        config.write_text("[problem]\nkind = 'quadratic'\ndim = 2\n")
        result = runner.invoke(main, ["sweep", "--config", str(config),
                                      "--out", str(tmp_path)])
        assert result.exit_code == 1


class TestRhoTraceCommand:
    def test_writes_schema_and_values(self, runner, tmp_path):
        out = tmp_path / "rho.csv"
        result = runner.invoke(main, [
            "rho-trace", "--steps", "100", "--peak-lr", "1.0",
            "--schedule", "constant", "--beta1", "0.9", "--beta2", "0.999",
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        rows = read_rows(out)
        assert rows[0] == RHO_HEADER
        assert len(rows) == 101
        first = dict(zip(RHO_HEADER, rows[1]))
        assert float(first["rho"]) == pytest.approx(0.31622776601683814, rel=1e-12)
        assert float(first["effective_lr"]) == pytest.approx(
            0.31622776601683814, rel=1e-12)

    def test_bias_off_reports_factor_but_does_not_apply(self, runner, tmp_path):
        out = tmp_path / "rho.csv"
        result = runner.invoke(main, [
            "rho-trace", "--steps", "10", "--no-bias-correction", "--out", str(out),
        ])
        assert result.exit_code == 0
        first = dict(zip(RHO_HEADER, read_rows(out)[1]))
        assert float(first["effective_lr"]) == float(first["lr"])
        assert float(first["rho"]) != 1.0


class TestCheckEquivalenceCommand:
    def test_pass_exit_zero(self, runner):
        result = runner.invoke(main, [
            "check-equivalence", "--problem",
            "quadratic(dim=4,condition_number=10.0,seed=1)",
            "--peak-lr", "1e-4", "--steps", "200", "--beta1", "0.9",
            "--beta2", "0.999",
        ])
        assert result.exit_code == 0, result.output
        assert "PASS" in result.output

    def test_fail_exit_two(self, runner):
        # a quadratic driven to its minimum at eps=0 enters sign-noise
        # dynamics whose rounding drift exceeds the tolerance
        result = runner.invoke(main, [
            "check-equivalence", "--problem",
            "quadratic(dim=8,condition_number=50.0,seed=1)",
            "--peak-lr", "3e-2", "--steps", "600", "--seed", "7815",
            "--beta1", "0.367", "--beta2", "0.926",
        ])
        assert result.exit_code == 2
        assert "FAIL" in result.output
