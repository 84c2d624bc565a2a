"""Sweep configuration files.

TOML with three tables; unknown tables or keys are errors, not warnings.

    [problem]            # kind plus that problem's own arguments
    kind = "logistic_regression"
    n_samples = 512
    dim = 10
    batch_size = 32
    seed = 7

    [optimizer]          # scalar hyperparameters shared by every run
    epsilon = 1e-8
    weight_decay = 0.0
    clip_norm = 1.0      # 0 disables clipping

    [sweep]              # list-valued axes; their product is the run grid
    learning_rates = [1e-3, 1e-2, 1e-1]
    beta_pairs = [[0.9, 0.999], [0.95, 0.95]]
    bias_correction = [true, false]
    schedule_kind = ["constant", "warmup-cosine"]
    warmup_fraction = 0.10
    seeds = [0, 1, 2, 3, 4]
    steps = 2000
"""

import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .records import ConfigError, ProblemSpec, SweepSpec

__all__ = ["load_sweep_spec", "parse_sweep_spec"]

_OPTIMIZER_KEYS = {"epsilon", "weight_decay", "clip_norm"}
_SWEEP_KEYS = {
    "learning_rates", "beta_pairs", "bias_correction", "schedule_kind",
    "warmup_fraction", "seeds", "steps",
}
_REQUIRED_SWEEP_KEYS = {
    "learning_rates", "beta_pairs", "bias_correction", "schedule_kind",
    "seeds", "steps",
}


def _reject_unknown(table: dict, allowed: set[str], where: str) -> None:
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in [{where}]; "
            f"allowed: {sorted(allowed)}"
        )


def parse_sweep_spec(data: dict) -> SweepSpec:
    _reject_unknown(data, {"problem", "optimizer", "sweep"}, "top level")
    for table in ("problem", "sweep"):
        if table not in data:
            raise ConfigError(f"missing required [{table}] table")

    problem_table = dict(data["problem"])
    kind = problem_table.pop("kind", None)
    if kind is None:
        raise ConfigError("[problem] table needs a 'kind' key")
    problem = ProblemSpec.make(kind, **problem_table)

    optimizer = dict(data.get("optimizer", {}))
    _reject_unknown(optimizer, _OPTIMIZER_KEYS, "optimizer")
    clip_norm = float(optimizer.get("clip_norm", 1.0))

    sweep_table = dict(data["sweep"])
    _reject_unknown(sweep_table, _SWEEP_KEYS, "sweep")
    missing = _REQUIRED_SWEEP_KEYS - set(sweep_table)
    if missing:
        raise ConfigError(f"missing key(s) {sorted(missing)} in [sweep]")

    beta_pairs = []
    for pair in sweep_table["beta_pairs"]:
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            raise ConfigError(f"beta_pairs entries must be [beta1, beta2], got {pair}")
        beta_pairs.append((float(pair[0]), float(pair[1])))

    return SweepSpec(
        problem=problem,
        learning_rates=tuple(float(lr) for lr in sweep_table["learning_rates"]),
        beta_pairs=tuple(beta_pairs),
        bias_correction=tuple(bool(b) for b in sweep_table["bias_correction"]),
        schedule_kind=tuple(str(k) for k in sweep_table["schedule_kind"]),
        seeds=tuple(int(s) for s in sweep_table["seeds"]),
        steps=int(sweep_table["steps"]),
        epsilon=float(optimizer.get("epsilon", 1e-8)),
        weight_decay=float(optimizer.get("weight_decay", 0.0)),
        clip_norm=None if clip_norm == 0.0 else clip_norm,
        warmup_fraction=float(sweep_table.get("warmup_fraction", 0.10)),
    )


def load_sweep_spec(path) -> SweepSpec:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from None
    return parse_sweep_spec(data)
