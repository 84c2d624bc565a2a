"""Run provenance records, sweep grids, curve aggregates, and their CSV forms.

CSV schemas (headers are exact and fixed):

    runs.csv   problem,beta1,beta2,epsilon,weight_decay,clip_norm,
               bias_correction,schedule,peak_lr,warmup_fraction,steps,seed,
               final_loss,wall_time_s
    trace.csv  run_id,step,loss
    rho.csv    step,lr,rho,effective_lr
    curves.csv problem,beta1,beta2,bias_correction,schedule,peak_lr,
               mean_final_loss,std_final_loss,n_seeds,n_diverged

Floats are written with repr so they round-trip losslessly; a diverged run
writes the literal string ``diverged`` in the final_loss column. A RunRecord
echoes every hyperparameter, so the record alone reproduces its run.
"""

import ast
import csv
import inspect
import math
import re
from dataclasses import dataclass

from . import problems
from .schedules import TraceRow

__all__ = [
    "ConfigError",
    "CurvePoint",
    "ProblemSpec",
    "RunRecord",
    "SensitivityCurve",
    "SweepSpec",
    "read_curves_csv",
    "read_rho_csv",
    "read_runs_csv",
    "write_curves_csv",
    "write_rho_csv",
    "write_runs_csv",
    "write_trace_csv",
]

RUNS_HEADER = [
    "problem", "beta1", "beta2", "epsilon", "weight_decay", "clip_norm",
    "bias_correction", "schedule", "peak_lr", "warmup_fraction", "steps",
    "seed", "final_loss", "wall_time_s",
]
TRACE_HEADER = ["run_id", "step", "loss"]
RHO_HEADER = ["step", "lr", "rho", "effective_lr"]
CURVES_HEADER = [
    "problem", "beta1", "beta2", "bias_correction", "schedule", "peak_lr",
    "mean_final_loss", "std_final_loss", "n_seeds", "n_diverged",
]

DIVERGED = "diverged"

PROBLEM_FACTORIES = {
    "quadratic": problems.quadratic,
    "rosenbrock": problems.rosenbrock,
    "logistic_regression": problems.logistic_regression,
    "tiny_mlp": problems.tiny_mlp,
}

SCHEDULE_KINDS = ("constant", "warmup-cosine")


class ConfigError(ValueError):
    """A user-supplied configuration (CLI flag, config file, CSV) is invalid."""


_SPEC_RE = re.compile(r"^(?P<kind>[a-z_]+)\((?P<args>.*)\)$")


@dataclass(frozen=True)
class ProblemSpec:
    """A problem factory call in data form, e.g. quadratic(dim=10, seed=3).

    Serializes to a canonical string (arguments in the factory's declared
    order) so records and run ids are byte-stable.
    """

    kind: str
    params: tuple[tuple[str, object], ...]

    @classmethod
    def make(cls, kind: str, **params) -> "ProblemSpec":
        if kind not in PROBLEM_FACTORIES:
            raise ConfigError(
                f"unknown problem kind '{kind}'; known: {sorted(PROBLEM_FACTORIES)}"
            )
        signature = inspect.signature(PROBLEM_FACTORIES[kind])
        unknown = set(params) - set(signature.parameters)
        if unknown:
            raise ConfigError(
                f"unknown parameter(s) {sorted(unknown)} for problem '{kind}'; "
                f"expected a subset of {list(signature.parameters)}"
            )
        try:
            bound = signature.bind(**params)
        except TypeError as exc:
            raise ConfigError(f"problem '{kind}': {exc}") from None
        bound.apply_defaults()
        return cls(kind=kind, params=tuple(bound.arguments.items()))

    @classmethod
    def from_string(cls, text: str) -> "ProblemSpec":
        match = _SPEC_RE.match(text.strip())
        if not match:
            raise ConfigError(
                f"cannot parse problem spec '{text}'; expected kind(name=value, ...)"
            )
        params = {}
        args = match.group("args").strip()
        if args:
            for part in args.split(","):
                if "=" not in part:
                    raise ConfigError(f"bad problem argument '{part.strip()}' in '{text}'")
                key, _, value = part.partition("=")
                try:
                    params[key.strip()] = ast.literal_eval(value.strip())
                except (ValueError, SyntaxError):
                    raise ConfigError(
                        f"bad value for '{key.strip()}' in problem spec '{text}'"
                    ) from None
        return cls.make(match.group("kind"), **params)

    def to_string(self) -> str:
        args = ",".join(f"{k}={v!r}" for k, v in self.params)
        return f"{self.kind}({args})"

    def build(self) -> problems.Problem:
        return PROBLEM_FACTORIES[self.kind](**dict(self.params))


@dataclass(frozen=True)
class RunRecord:
    """Everything needed to reproduce and score one training run."""

    problem: str
    beta1: float
    beta2: float
    epsilon: float
    weight_decay: float
    clip_norm: float | None
    bias_correction: bool
    schedule: str
    peak_lr: float
    warmup_fraction: float | None
    steps: int
    seed: int
    final_loss: float
    wall_time_s: float
    diverged: bool = False
    loss_trace: tuple[tuple[int, float], ...] = ()

    @property
    def run_id(self) -> str:
        kind = self.problem.split("(", 1)[0]
        return (
            f"{kind}+lr={self.peak_lr!r}+b1={self.beta1!r}+b2={self.beta2!r}"
            f"+bc={int(self.bias_correction)}+sched={self.schedule}+seed={self.seed}"
        )


@dataclass(frozen=True)
class SweepSpec:
    """Grid of runs: the Cartesian product of the list-valued fields."""

    problem: ProblemSpec
    learning_rates: tuple[float, ...]
    beta_pairs: tuple[tuple[float, float], ...]
    bias_correction: tuple[bool, ...]
    schedule_kind: tuple[str, ...]
    seeds: tuple[int, ...]
    steps: int
    epsilon: float = 1e-8
    weight_decay: float = 0.0
    clip_norm: float | None = 1.0
    warmup_fraction: float = 0.10

    def __post_init__(self):
        for name in ("learning_rates", "beta_pairs", "bias_correction",
                     "schedule_kind", "seeds"):
            if len(getattr(self, name)) == 0:
                raise ConfigError(f"sweep field '{name}' must be non-empty")
        if any(lr <= 0 for lr in self.learning_rates):
            raise ConfigError("learning_rates must all be > 0")
        for kind in self.schedule_kind:
            if kind not in SCHEDULE_KINDS:
                raise ConfigError(
                    f"unknown schedule kind '{kind}'; known: {list(SCHEDULE_KINDS)}"
                )
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")

    @property
    def n_runs(self) -> int:
        return (
            len(self.learning_rates) * len(self.beta_pairs)
            * len(self.bias_correction) * len(self.schedule_kind) * len(self.seeds)
        )


@dataclass(frozen=True)
class CurvePoint:
    peak_lr: float
    mean_final_loss: float | None
    std_final_loss: float | None
    n_seeds: int
    n_diverged: int


@dataclass(frozen=True)
class SensitivityCurve:
    """Final loss vs peak learning rate for one (beta pair, flag, schedule)."""

    problem: str
    beta1: float
    beta2: float
    bias_correction: bool
    schedule: str
    points: tuple[CurvePoint, ...]

    def best(self) -> CurvePoint:
        """Point with the lowest mean final loss; ties go to the smaller lr."""
        scored = [p for p in self.points if p.mean_final_loss is not None]
        if not scored:
            raise ValueError("curve has no non-diverged points")
        return min(scored, key=lambda p: (p.mean_final_loss, p.peak_lr))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_optional_float(text: str) -> float | None:
    return None if text == "" else float(text)


def write_runs_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUNS_HEADER)
        for r in records:
            writer.writerow([
                r.problem, _fmt(r.beta1), _fmt(r.beta2), _fmt(r.epsilon),
                _fmt(r.weight_decay), _fmt(r.clip_norm), _fmt(r.bias_correction),
                r.schedule, _fmt(r.peak_lr), _fmt(r.warmup_fraction),
                r.steps, r.seed,
                DIVERGED if r.diverged else _fmt(r.final_loss),
                _fmt(r.wall_time_s),
            ])


def read_runs_csv(path) -> list[RunRecord]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RUNS_HEADER:
            raise ConfigError(f"bad runs.csv header {header}; expected {RUNS_HEADER}")
        records = []
        for row in reader:
            data = dict(zip(RUNS_HEADER, row))
            diverged = data["final_loss"] == DIVERGED
            records.append(RunRecord(
                problem=data["problem"],
                beta1=float(data["beta1"]),
                beta2=float(data["beta2"]),
                epsilon=float(data["epsilon"]),
                weight_decay=float(data["weight_decay"]),
                clip_norm=_parse_optional_float(data["clip_norm"]),
                bias_correction=data["bias_correction"] == "true",
                schedule=data["schedule"],
                peak_lr=float(data["peak_lr"]),
                warmup_fraction=_parse_optional_float(data["warmup_fraction"]),
                steps=int(data["steps"]),
                seed=int(data["seed"]),
                final_loss=math.inf if diverged else float(data["final_loss"]),
                wall_time_s=float(data["wall_time_s"]),
                diverged=diverged,
            ))
    return records


def write_trace_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for r in records:
            for step, loss in r.loss_trace:
                writer.writerow([r.run_id, step, _fmt(float(loss))])


def write_rho_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RHO_HEADER)
        for row in rows:
            writer.writerow([
                row.step, _fmt(float(row.lr)), _fmt(float(row.rho)),
                _fmt(float(row.effective_lr)),
            ])


def read_rho_csv(path) -> list[TraceRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RHO_HEADER:
            raise ConfigError(f"bad rho.csv header {header}; expected {RHO_HEADER}")
        return [
            TraceRow(step=int(r[0]), lr=float(r[1]), rho=float(r[2]),
                     effective_lr=float(r[3]))
            for r in reader
        ]


def write_curves_csv(curves, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVES_HEADER)
        for c in curves:
            for p in c.points:
                writer.writerow([
                    c.problem, _fmt(c.beta1), _fmt(c.beta2),
                    _fmt(c.bias_correction), c.schedule, _fmt(p.peak_lr),
                    _fmt(p.mean_final_loss), _fmt(p.std_final_loss),
                    p.n_seeds, p.n_diverged,
                ])


def read_curves_csv(path) -> list[SensitivityCurve]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CURVES_HEADER:
            raise ConfigError(f"bad curves.csv header {header}; expected {CURVES_HEADER}")
        grouped: dict[tuple, list[CurvePoint]] = {}
        for row in reader:
            data = dict(zip(CURVES_HEADER, row))
            key = (data["problem"], float(data["beta1"]), float(data["beta2"]),
                   data["bias_correction"] == "true", data["schedule"])
            grouped.setdefault(key, []).append(CurvePoint(
                peak_lr=float(data["peak_lr"]),
                mean_final_loss=_parse_optional_float(data["mean_final_loss"]),
                std_final_loss=_parse_optional_float(data["std_final_loss"]),
                n_seeds=int(data["n_seeds"]),
                n_diverged=int(data["n_diverged"]),
            ))
    return [
        SensitivityCurve(problem=k[0], beta1=k[1], beta2=k[2],
                         bias_correction=k[3], schedule=k[4], points=tuple(pts))
        for k, pts in grouped.items()
    ]
