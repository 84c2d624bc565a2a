"""Learning-rate laws and the absorption of bias correction into them.

Three schedule kinds:

* Constant: lr is peak_lr at every step.
* WarmupCosine: linear ramp from peak_lr/W up to peak_lr over the first
  W = ceil(warmup_fraction * total_steps) steps, then cosine decay to
  exactly 0 at the final step.
* Absorbed: any base schedule multiplied pointwise by the bias-correction
  factor, so an optimizer run *without* bias correction under the absorbed
  schedule retraces a run *with* bias correction under the base schedule.

Schedules are immutable values; ``lr_at(schedule, t)`` is total on
t = 1..total_steps and deterministic.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

from .optim import AdamConfig, bias_correction_factor

__all__ = [
    "Absorbed",
    "Constant",
    "Schedule",
    "TraceRow",
    "WarmupCosine",
    "absorb",
    "effective_lr_trace",
    "lr_at",
    "schedule_label",
    "warmup_steps",
]


def _check_common(peak_lr: float, total_steps: int) -> None:
    if not (peak_lr >= 0.0 and math.isfinite(peak_lr)):
        raise ValueError(f"peak_lr must be finite and >= 0, got {peak_lr}")
    if total_steps < 1:
        raise ValueError(f"total_steps must be >= 1, got {total_steps}")


@dataclass(frozen=True)
class Constant:
    peak_lr: float
    total_steps: int

    def __post_init__(self):
        _check_common(self.peak_lr, self.total_steps)


@dataclass(frozen=True)
class WarmupCosine:
    peak_lr: float
    total_steps: int
    warmup_fraction: float = 0.10

    def __post_init__(self):
        _check_common(self.peak_lr, self.total_steps)
        if not (0.0 <= self.warmup_fraction < 1.0):
            raise ValueError(
                f"warmup_fraction must be in [0, 1), got {self.warmup_fraction}"
            )
        if warmup_steps(self) >= self.total_steps:
            raise ValueError(
                "warmup covers every step; decay to zero needs at least one "
                f"post-warmup step (warmup {warmup_steps(self)} of "
                f"{self.total_steps})"
            )


@dataclass(frozen=True)
class Absorbed:
    """A base schedule scaled pointwise by the bias-correction factor."""

    inner: Union[Constant, WarmupCosine]
    beta1: float
    beta2: float

    def __post_init__(self):
        if isinstance(self.inner, Absorbed):
            raise ValueError("absorption is applied at most once")
        # Validate the betas eagerly rather than on first lr_at call.
        bias_correction_factor(1, self.beta1, self.beta2)

    @property
    def peak_lr(self) -> float:
        return self.inner.peak_lr

    @property
    def total_steps(self) -> int:
        return self.inner.total_steps


Schedule = Union[Constant, WarmupCosine, Absorbed]


def warmup_steps(schedule: WarmupCosine) -> int:
    """Number of linear-warmup steps, W = ceil(warmup_fraction * T).

    The product is rounded to 9 decimals first so float artifacts like
    0.07 * 100 = 7.000000000000001 do not bump W by one.
    """
    return math.ceil(round(schedule.warmup_fraction * schedule.total_steps, 9))


def lr_at(schedule: Schedule, t: int) -> float:
    """Learning rate at step t (1-based, inclusive of total_steps)."""
    if not (1 <= t <= schedule.total_steps):
        raise ValueError(
            f"step {t} outside schedule range [1, {schedule.total_steps}]"
        )
    if isinstance(schedule, Constant):
        return schedule.peak_lr
    if isinstance(schedule, WarmupCosine):
        w = warmup_steps(schedule)
        if t <= w:
            return schedule.peak_lr * t / w
        progress = (t - w) / (schedule.total_steps - w)
        return schedule.peak_lr * 0.5 * (1.0 + math.cos(math.pi * progress))
    if isinstance(schedule, Absorbed):
        return lr_at(schedule.inner, t) * bias_correction_factor(
            t, schedule.beta1, schedule.beta2
        )
    raise TypeError(f"unknown schedule type {type(schedule).__name__}")


def absorb(schedule: Schedule, beta1: float, beta2: float) -> Absorbed:
    """Fold bias correction into an explicit schedule.

    The returned schedule satisfies lr_at(absorbed, t) ==
    lr_at(schedule, t) * bias_correction_factor(t, beta1, beta2) for every t.
    Absorbing twice is rejected.
    """
    if isinstance(schedule, Absorbed):
        raise ValueError("schedule is already absorbed")
    return Absorbed(inner=schedule, beta1=beta1, beta2=beta2)


class TraceRow(NamedTuple):
    step: int
    lr: float
    rho: float
    effective_lr: float


def effective_lr_trace(
    schedule: Schedule, config: AdamConfig, steps: int
) -> list[TraceRow]:
    """Tabulate the learning rate the optimizer effectively applies.

    One row per step: the scheduled lr, the bias-correction factor, and
    their product. When config.bias_correction is off the effective column
    equals the scheduled lr (the factor is still reported for reference).
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    rows = []
    for t in range(1, steps + 1):
        lr = lr_at(schedule, t)
        factor = bias_correction_factor(t, config.beta1, config.beta2)
        effective = lr * factor if config.bias_correction else lr
        rows.append(TraceRow(step=t, lr=lr, rho=factor, effective_lr=effective))
    return rows


def schedule_label(schedule: Schedule) -> str:
    """Stable text name used in CSV columns and run ids."""
    if isinstance(schedule, Constant):
        return "constant"
    if isinstance(schedule, WarmupCosine):
        return "warmup-cosine"
    if isinstance(schedule, Absorbed):
        return f"absorbed({schedule_label(schedule.inner)})"
    raise TypeError(f"unknown schedule type {type(schedule).__name__}")
