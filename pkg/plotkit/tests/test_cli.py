from pathlib import Path

import pytest
from click.testing import CliRunner

from plotkit.cli import main

DATA = Path(__file__).resolve().parent / "data"


@pytest.fixture
def runner():
    return CliRunner()


class TestSensitivityCommand:
    def test_writes_figure(self, runner, tmp_path):
        out = tmp_path / "fig.svg"
        result = runner.invoke(main, [
            "sensitivity", "--in", str(DATA / "curves_beta_grid.csv"),
            "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert out.exists() and out.stat().st_size > 0

    def test_schema_mismatch_nonzero_exit_with_diagnostic(self, runner, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("alpha,beta\n1,2\n")
        out = tmp_path / "fig.svg"
        result = runner.invoke(main, [
            "sensitivity", "--in", str(bad), "--out", str(out)])
        assert result.exit_code == 1
        assert "missing columns" in result.output
        assert not out.exists()

    def test_empty_csv_no_file_written(self, runner, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text(
            "problem,beta1,beta2,bias_correction,schedule,peak_lr,"
            "mean_final_loss,std_final_loss,n_seeds,n_diverged\n")
        out = tmp_path / "fig.svg"
        result = runner.invoke(main, [
            "sensitivity", "--in", str(empty), "--out", str(out)])
        assert result.exit_code == 1
        assert not out.exists()


class TestEffectiveLrCommand:
    def test_two_traces(self, runner, tmp_path):
        out = tmp_path / "fig.svg"
        result = runner.invoke(main, [
            "effective-lr",
            "--in", str(DATA / "rho_default_betas.csv"),
            "--in", str(DATA / "rho_equal_betas.csv"),
            "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert out.exists()

    def test_mismatched_ranges_error(self, runner, tmp_path):
        short = tmp_path / "short.csv"
        lines = (DATA / "rho_default_betas.csv").read_text().splitlines()
        short.write_text("\n".join(lines[:100]) + "\n")
        out = tmp_path / "fig.svg"
        result = runner.invoke(main, [
            "effective-lr", "--in", str(DATA / "rho_default_betas.csv"),
            "--in", str(short), "--out", str(out)])
        assert result.exit_code == 1
        assert "step ranges" in result.output
        assert not out.exists()


class TestRhoDecayCommand:
    def test_writes_figure(self, runner, tmp_path):
        out = tmp_path / "fig.svg"
        result = runner.invoke(main, [
            "rho-decay", "--beta", "0.9", "--beta", "0.9875",
            "--steps", "100", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert out.exists()

    def test_bad_beta_rejected(self, runner, tmp_path):
        result = runner.invoke(main, [
            "rho-decay", "--beta", "1.0", "--out", str(tmp_path / "f.svg")])
        assert result.exit_code == 1

    def test_png_output(self, runner, tmp_path):
        out = tmp_path / "fig.png"
        result = runner.invoke(main, [
            "rho-decay", "--beta", "0.9", "--out", str(out)])
        assert result.exit_code == 0
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
