from pathlib import Path

import pytest

from adamlab.configfile import load_sweep_spec, parse_sweep_spec
from adamlab.records import ConfigError

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


class TestShippedConfigs:
    def test_beta_equal_sweep_loads(self):
        spec = load_sweep_spec(CONFIG_DIR / "beta_equal_sweep.toml")
        assert spec.beta_pairs == (
            (0.9, 0.9), (0.95, 0.95), (0.975, 0.975), (0.9875, 0.9875))
        assert spec.bias_correction == (True, False)
        assert set(spec.schedule_kind) == {"constant", "warmup-cosine"}
        assert len(spec.learning_rates) == 7
        assert len(spec.seeds) == 5

    def test_beta_pairs_sweep_loads(self):
        spec = load_sweep_spec(CONFIG_DIR / "beta_pairs_sweep.toml")
        assert spec.beta_pairs == ((0.9, 0.999), (0.95, 0.95))
        assert spec.n_runs == 7 * 2 * 2 * 2 * 5


class TestParsing:
    BASE = {
        "problem": {"kind": "quadratic", "dim": 3},
        "sweep": {
            "learning_rates": [0.1], "beta_pairs": [[0.9, 0.999]],
            "bias_correction": [True], "schedule_kind": ["constant"],
            "seeds": [0], "steps": 10,
        },
    }

    def test_minimal(self):
        spec = parse_sweep_spec(self.BASE)
        assert spec.problem.kind == "quadratic"
        assert spec.epsilon == 1e-8      # optimizer defaults
        assert spec.clip_norm == 1.0

    def test_clip_norm_zero_disables(self):
        data = dict(self.BASE, optimizer={"clip_norm": 0.0})
        assert parse_sweep_spec(data).clip_norm is None

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="extra"):
            parse_sweep_spec(dict(self.BASE, extra={}))

    def test_unknown_optimizer_key(self):
        data = dict(self.BASE, optimizer={"momentum": 0.9})
        with pytest.raises(ConfigError, match="momentum"):
            parse_sweep_spec(data)

    def test_unknown_sweep_key(self):
        data = dict(self.BASE)
        data["sweep"] = dict(data["sweep"], warmup=0.2)
        with pytest.raises(ConfigError, match="warmup"):
            parse_sweep_spec(data)

    def test_unknown_problem_parameter(self):
        data = dict(self.BASE, problem={"kind": "quadratic", "dims": 3})
        with pytest.raises(ConfigError, match="dims"):
            parse_sweep_spec(data)

    def test_missing_required_sweep_key(self):
        data = dict(self.BASE)
        data["sweep"] = {k: v for k, v in data["sweep"].items() if k != "seeds"}
        with pytest.raises(ConfigError, match="seeds"):
            parse_sweep_spec(data)

    def test_bad_beta_pair_shape(self):
        data = dict(self.BASE)
        data["sweep"] = dict(data["sweep"], beta_pairs=[[0.9]])
        with pytest.raises(ConfigError, match="beta_pairs"):
            parse_sweep_spec(data)

    def test_bad_toml_file(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("[problem\nkind=")
        with pytest.raises(ConfigError):
            load_sweep_spec(path)
