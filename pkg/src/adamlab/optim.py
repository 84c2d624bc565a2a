"""Adam/AdamW update rule with toggleable bias correction.

One optimizer step with bias correction on:

    m <- beta1*m + (1-beta1)*g
    v <- beta2*v + (1-beta2)*g^2
    m_hat = m / (1 - beta1^t),  v_hat = v / (1 - beta2^t)
    theta <- theta - lr * m_hat / (sqrt(v_hat) + epsilon) - lr * weight_decay * theta

With bias correction off the hat terms are simply omitted:

    theta <- theta - lr * m / (sqrt(v) + epsilon) - lr * weight_decay * theta

Ignoring epsilon, the two directions differ only by the scalar
``bias_correction_factor(t) = sqrt(1 - beta2^t) / (1 - beta1^t)``, so bias
correction is equivalent to multiplying the learning-rate schedule by that
factor (see :mod:`adamlab.schedules`). The match stays exact for epsilon > 0
if the uncorrected run rescales epsilon per step to
``epsilon * sqrt(1 - beta2^t)``.

Parameter vectors, gradients, and moments are flat 1-D float64 numpy arrays.
All functions here are pure: they never mutate their inputs, and identical
inputs produce bitwise-identical outputs.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AdamConfig",
    "AdamState",
    "DivergenceError",
    "adam_step",
    "bias_correction_factor",
    "clip_global_norm",
    "ema_closed_form",
]


class DivergenceError(RuntimeError):
    """A loss, gradient, or parameter became non-finite.

    Carries the 1-based step index at which the run blew up (None when the
    failure happened outside a step, e.g. in a standalone clip call).
    """

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


def _check_beta(name: str, value: float) -> None:
    if not (0.0 <= value < 1.0):
        raise ValueError(f"{name} must be in [0, 1), got {value}")


@dataclass(frozen=True)
class AdamConfig:
    """Hyperparameters of one AdamW configuration.

    epsilon = 0 is allowed: it is what makes the bias-correction /
    learning-rate equivalence exact, at the cost of a 0/0 (and hence a
    divergence signal) if an update ever hits m = v = 0.
    """

    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    weight_decay: float = 0.0
    clip_norm: float | None = None
    bias_correction: bool = True

    def __post_init__(self):
        _check_beta("beta1", self.beta1)
        _check_beta("beta2", self.beta2)
        if not (self.epsilon >= 0.0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        if not (self.weight_decay >= 0.0 and math.isfinite(self.weight_decay)):
            raise ValueError(f"weight_decay must be finite and >= 0, got {self.weight_decay}")
        if self.clip_norm is not None and not (self.clip_norm > 0.0):
            raise ValueError(f"clip_norm must be > 0 when set, got {self.clip_norm}")


@dataclass(frozen=True)
class AdamState:
    """First/second moment vectors and the count of applied steps.

    t is 0 before any update; the first applied update uses t = 1, so the
    bias-correction denominators on step one are (1 - beta1) and (1 - beta2).
    """

    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, dim: int) -> "AdamState":
        return cls(m=np.zeros(dim), v=np.zeros(dim), t=0)


def bias_correction_factor(t: int, beta1: float, beta2: float) -> float:
    """Scalar ratio between the bias-corrected and raw step directions.

    Equals sqrt(1 - beta2^t) / (1 - beta1^t). For beta1 = beta2 = beta this
    reduces to (1 - beta^t)^(-1/2), which starts at (1-beta)^(-1/2) >= 1 and
    decays monotonically to 1. For beta2 > beta1 (e.g. the common
    (0.9, 0.999)) the factor starts below 1 and is not monotone in t.
    """
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t} (factor is 0/0 at t=0)")
    _check_beta("beta1", beta1)
    _check_beta("beta2", beta2)
    return math.sqrt(1.0 - beta2**t) / (1.0 - beta1**t)


def clip_global_norm(grad: np.ndarray, threshold: float) -> np.ndarray:
    """Rescale grad so its global L2 norm is at most threshold.

    Gradients already within the threshold pass through unchanged.
    Raises DivergenceError on non-finite entries.
    """
    if not (threshold > 0.0):
        raise ValueError(f"clip threshold must be > 0, got {threshold}")
    grad = np.asarray(grad, dtype=np.float64)
    if not np.all(np.isfinite(grad)):
        raise DivergenceError("non-finite gradient entries in clip_global_norm")
    norm = float(np.linalg.norm(grad))
    if norm <= threshold:
        return grad
    return grad * (threshold / norm)


def adam_step(
    params: np.ndarray,
    state: AdamState,
    grad: np.ndarray,
    lr: float,
    config: AdamConfig,
) -> tuple[np.ndarray, AdamState]:
    """Apply one AdamW update and return the new (params, state).

    The step counter increments first (state.t counts previously applied
    steps, so this update is step t = state.t + 1). Clipping, when enabled,
    acts on the raw gradient before the moment updates. Decoupled weight
    decay subtracts lr * weight_decay * theta using the pre-step parameters;
    it bypasses the moments, the clip, and the bias correction.
    """
    params = np.asarray(params, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if params.shape != grad.shape or params.shape != state.m.shape:
        raise ValueError(
            f"shape mismatch: params {params.shape}, grad {grad.shape}, state {state.m.shape}"
        )
    if not (lr >= 0.0 and math.isfinite(lr)):
        raise ValueError(f"lr must be finite and >= 0, got {lr}")

    t = state.t + 1
    if not np.all(np.isfinite(grad)):
        raise DivergenceError(f"non-finite gradient at step {t}", step=t)
    if config.clip_norm is not None:
        grad = clip_global_norm(grad, config.clip_norm)

    m = config.beta1 * state.m + (1.0 - config.beta1) * grad
    v = config.beta2 * state.v + (1.0 - config.beta2) * grad * grad

    # overflow/0-div produce non-finite values, which the check below turns
    # into a divergence signal; suppress the interim warnings
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if config.bias_correction:
            m_hat = m / (1.0 - config.beta1**t)
            v_hat = v / (1.0 - config.beta2**t)
            direction = m_hat / (np.sqrt(v_hat) + config.epsilon)
        else:
            direction = m / (np.sqrt(v) + config.epsilon)
        new_params = params - lr * direction - lr * config.weight_decay * params
    if not np.all(np.isfinite(new_params)):
        raise DivergenceError(f"non-finite parameters after step {t}", step=t)
    return new_params, AdamState(m=m, v=v, t=t)


def ema_closed_form(grads, beta: float, square: bool = False) -> np.ndarray:
    """Closed-form value of the moment EMA after a gradient sequence.

    Computes (1-beta) * sum_j beta^(t-j) * g_j over j = 1..t (g_j^2 when
    square is set), i.e. the unrolled form of m <- beta*m + (1-beta)*g
    starting from zero. Used as the independent oracle for the recursive
    updates in adam_step.
    """
    _check_beta("beta", beta)
    grads = [np.asarray(g, dtype=np.float64) for g in grads]
    if len(grads) == 0:
        raise ValueError("ema_closed_form needs a non-empty gradient sequence")
    t = len(grads)
    total = np.zeros_like(grads[0])
    for j, g in enumerate(grads, start=1):
        term = g * g if square else g
        # beta^0 is defined as 1 even for beta = 0, so the last term survives.
        total = total + beta ** (t - j) * term
    return (1.0 - beta) * total
