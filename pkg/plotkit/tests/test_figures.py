import hashlib
from pathlib import Path

import pytest

from plotkit import (
    SchemaError,
    build_effective_lr_figure,
    build_rho_decay_figure,
    build_sensitivity_figure,
    read_curves,
    read_rho,
    save_figure,
)
from plotkit.io import CURVES_HEADER

DATA = Path(__file__).resolve().parent / "data"

TOY_CURVES = """\
problem,beta1,beta2,bias_correction,schedule,peak_lr,mean_final_loss,std_final_loss,n_seeds,n_diverged
toy,0.9,0.999,true,constant,0.01,1.0,0.1,3,0
toy,0.9,0.999,true,constant,0.1,0.5,0.05,3,0
toy,0.9,0.999,false,constant,0.01,1.1,0.1,3,0
toy,0.9,0.999,false,constant,0.1,0.6,0.05,3,0
"""

TOY_CURVES_DIVERGED = TOY_CURVES + "toy,0.9,0.999,true,constant,1.0,,,0,3\n"


class TestReadCurves:
    def test_reads_golden(self):
        rows = read_curves(DATA / "curves_beta_grid.csv")
        assert len(rows) == 40
        assert {(r.beta1, r.beta2) for r in rows} == {
            (0.9, 0.9), (0.95, 0.95), (0.975, 0.975), (0.9875, 0.9875)}

    def test_missing_column_diagnostic(self, tmp_path):
        path = tmp_path / "bad.csv"
        header = ",".join(c for c in CURVES_HEADER if c != "peak_lr")
        path.write_text(header + "\n")
        with pytest.raises(SchemaError, match="peak_lr"):
            read_curves(path)

    def test_extra_column_diagnostic(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(",".join(CURVES_HEADER + ["bonus"]) + "\n")
        with pytest.raises(SchemaError, match="bonus"):
            read_curves(path)

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text(",".join(CURVES_HEADER) + "\n")
        with pytest.raises(SchemaError, match="no data rows"):
            read_curves(path)


class TestSensitivityFigure:
    def test_toy_two_series(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text(TOY_CURVES)
        fig = build_sensitivity_figure(read_curves(path))
        (ax,) = [a for a in fig.axes if a.get_visible()]
        labels = [t.get_text() for t in ax.get_legend().get_texts()]
        assert labels == ["bias correction on", "bias correction off"]
        assert ax.get_xscale() == "log"
        out = tmp_path / "toy.svg"
        save_figure(fig, out)
        assert out.exists() and out.stat().st_size > 0

    def test_golden_has_four_panels(self):
        fig = build_sensitivity_figure(read_curves(DATA / "curves_beta_grid.csv"))
        visible = [ax for ax in fig.axes if ax.get_visible()]
        assert len(visible) == 4
        assert all(ax.get_xscale() == "log" for ax in visible)
        save_figure(fig, "/dev/null")

    def test_diverged_points_marked(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text(TOY_CURVES_DIVERGED)
        fig = build_sensitivity_figure(read_curves(path))
        (ax,) = [a for a in fig.axes if a.get_visible()]
        labels = [t.get_text() for t in ax.get_legend().get_texts()]
        assert "diverged seeds" in labels
        save_figure(fig, "/dev/null")


class TestEffectiveLrFigure:
    def test_overlay_from_golden(self, tmp_path):
        default = read_rho(DATA / "rho_default_betas.csv")
        equal = read_rho(DATA / "rho_equal_betas.csv")
        nominal = default[0].lr
        # the default setting starts below the nominal lr, the equal-betas
        # setting starts ~4.47x above it
        assert default[0].effective_lr == pytest.approx(0.31622776601683814 * nominal,
                                                        rel=1e-12)
        assert equal[0].effective_lr == pytest.approx(4.4721359549995774 * nominal,
                                                      rel=1e-12)
        fig = build_effective_lr_figure([("default", default), ("equal", equal)])
        out = tmp_path / "eff.svg"
        save_figure(fig, out)
        assert out.exists() and out.stat().st_size > 0

    def test_mismatched_step_ranges_rejected(self):
        default = read_rho(DATA / "rho_default_betas.csv")
        with pytest.raises(SchemaError, match="step ranges"):
            build_effective_lr_figure([("a", default), ("b", default[:100])])


class TestRhoDecayFigure:
    def test_beta_zero_flat_at_one(self):
        fig = build_rho_decay_figure([0.0], 50)
        (line,) = [l for l in fig.axes[0].get_lines() if l.get_label() == "beta=0"]
        assert all(y == 1.0 for y in line.get_ydata())
        save_figure(fig, "/dev/null")

    def test_curves_at_least_one_and_decreasing(self):
        fig = build_rho_decay_figure([0.9, 0.95, 0.975, 0.9875], 100)
        for line in fig.axes[0].get_lines():
            ys = list(line.get_ydata())
            if not line.get_label().startswith("beta="):
                continue  # the y=1 reference line
            assert all(y >= 1.0 for y in ys)
            assert all(a > b for a, b in zip(ys, ys[1:]))
        save_figure(fig, "/dev/null")

    def test_larger_beta_decays_slower(self):
        fig = build_rho_decay_figure([0.9, 0.9875], 100)
        by_label = {l.get_label(): list(l.get_ydata())
                    for l in fig.axes[0].get_lines()}
        low, high = by_label["beta=0.9"], by_label["beta=0.9875"]
        assert all(h > l for h, l in zip(high, low))
        save_figure(fig, "/dev/null")

    def test_matches_shipped_golden_hash(self, tmp_path):
        out = tmp_path / "decay.svg"
        save_figure(build_rho_decay_figure([0.9, 0.95, 0.975, 0.9875], 100), out)
        digest = hashlib.sha256(out.read_bytes()).hexdigest()
        expected = (DATA / "rho_decay_golden.sha256").read_text().strip()
        assert digest == expected

    def test_reproducible_byte_for_byte(self, tmp_path):
        paths = [tmp_path / "a.svg", tmp_path / "b.svg"]
        for path in paths:
            save_figure(build_rho_decay_figure([0.5, 0.9], 40), path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_validation(self):
        with pytest.raises(ValueError):
            build_rho_decay_figure([1.0], 10)
        with pytest.raises(ValueError):
            build_rho_decay_figure([0.9], 0)
