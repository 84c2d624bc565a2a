"""AdamW with toggleable bias correction, schedule absorption, and a sweep harness."""

from .harness import (
    EquivalenceReport,
    build_schedule,
    check_equivalence,
    rerun,
    run,
    summarize,
    sweep,
)
from .optim import (
    AdamConfig,
    AdamState,
    DivergenceError,
    adam_step,
    bias_correction_factor,
    clip_global_norm,
    ema_closed_form,
)
from .problems import (
    Problem,
    finite_diff_grad,
    logistic_regression,
    quadratic,
    rosenbrock,
    tiny_mlp,
)
from .records import (
    ConfigError,
    CurvePoint,
    ProblemSpec,
    RunRecord,
    SensitivityCurve,
    SweepSpec,
)
from .schedules import (
    Absorbed,
    Constant,
    Schedule,
    WarmupCosine,
    absorb,
    effective_lr_trace,
    lr_at,
)

__all__ = [
    "Absorbed",
    "AdamConfig",
    "AdamState",
    "ConfigError",
    "Constant",
    "CurvePoint",
    "DivergenceError",
    "EquivalenceReport",
    "Problem",
    "ProblemSpec",
    "RunRecord",
    "Schedule",
    "SensitivityCurve",
    "SweepSpec",
    "WarmupCosine",
    "absorb",
    "adam_step",
    "bias_correction_factor",
    "build_schedule",
    "check_equivalence",
    "clip_global_norm",
    "effective_lr_trace",
    "ema_closed_form",
    "finite_diff_grad",
    "logistic_regression",
    "lr_at",
    "quadratic",
    "rerun",
    "rosenbrock",
    "run",
    "summarize",
    "sweep",
    "tiny_mlp",
]
