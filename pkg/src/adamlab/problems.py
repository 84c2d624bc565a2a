"""Desk-scale differentiable objectives with exact gradient oracles.

Each factory returns an immutable Problem whose ``eval(params, batch_seed)``
is a pure function: deterministic problems ignore batch_seed, stochastic ones
draw a fixed minibatch from it. ``batch_seed=None`` always evaluates the full
(deterministic) training objective, which is what finite-difference checks
use. ``validate(params)`` scores parameters the way a run is judged: the
exact objective for deterministic problems, and the loss on a held-out
split (drawn once from the same distribution as the training data) for
stochastic ones. Datasets are synthesized in memory from the problem seed,
so rebuilding a problem with the same arguments reproduces them byte for
byte.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .rng import rng_for

__all__ = [
    "Problem",
    "finite_diff_grad",
    "logistic_regression",
    "quadratic",
    "rosenbrock",
    "tiny_mlp",
]

EvalFn = Callable[[np.ndarray, int | None], tuple[float, np.ndarray]]
InitFn = Callable[[int], np.ndarray]


@dataclass(frozen=True)
class Problem:
    """A differentiable objective with an exact gradient.

    eval maps (params, batch_seed) to (loss, grad); init maps a run seed to
    a starting parameter vector of length dim; validate maps parameters to
    the score a finished run reports (held-out loss for stochastic problems,
    the objective itself otherwise).
    """

    name: str
    dim: int
    deterministic: bool
    eval: EvalFn
    init: InitFn
    validate: Callable[[np.ndarray], float]


def quadratic(dim: int, condition_number: float = 1.0, seed: int = 0) -> Problem:
    """Diagonal quadratic bowl: loss = 0.5 * theta' A theta, grad = A theta.

    The eigenvalues of A are log-spaced in [1, condition_number] and shuffled
    across coordinates by the seed. Unique minimum at 0 with loss 0.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if condition_number < 1.0:
        raise ValueError(f"condition_number must be >= 1, got {condition_number}")
    diag = np.logspace(0.0, math.log10(condition_number), dim)
    diag = rng_for(seed, "quadratic-diag").permutation(diag)

    def eval_fn(params, batch_seed=None):
        theta = np.asarray(params, dtype=np.float64)
        grad = diag * theta
        loss = 0.5 * float(theta @ grad)
        return loss, grad

    def init_fn(run_seed):
        return rng_for(run_seed, "init-quadratic", seed).standard_normal(dim)

    return Problem(
        name="quadratic", dim=dim, deterministic=True, eval=eval_fn,
        init=init_fn, validate=lambda params: eval_fn(params)[0],
    )


def rosenbrock(dim: int) -> Problem:
    """Separable-pairs Rosenbrock: sum over pairs (x, y) of
    100*(y - x^2)^2 + (1 - x)^2. Minimum 0 at the all-ones vector.
    """
    if dim < 2 or dim % 2 != 0:
        raise ValueError(f"dim must be even and >= 2, got {dim}")

    def eval_fn(params, batch_seed=None):
        theta = np.asarray(params, dtype=np.float64)
        x = theta[0::2]
        y = theta[1::2]
        gap = y - x * x
        loss = float(np.sum(100.0 * gap * gap + (1.0 - x) ** 2))
        grad = np.empty_like(theta)
        grad[0::2] = -400.0 * x * gap - 2.0 * (1.0 - x)
        grad[1::2] = 200.0 * gap
        return loss, grad

    def init_fn(run_seed):
        return rng_for(run_seed, "init-rosenbrock").uniform(-2.0, 2.0, size=dim)

    return Problem(
        name="rosenbrock", dim=dim, deterministic=True, eval=eval_fn,
        init=init_fn, validate=lambda params: eval_fn(params)[0],
    )


def logistic_regression(
    n_samples: int, dim: int, batch_size: int, seed: int = 0
) -> Problem:
    """Binary logistic regression on two synthetic Gaussian blobs.

    Features for the two balanced classes are drawn once from the seed around
    means +/- mu with unit covariance. Loss is mean cross-entropy; the
    full-batch objective is convex in theta, and at theta = 0 it equals ln 2
    exactly. Minibatches are uniform subsets keyed by batch_seed, so the
    minibatch gradient is an unbiased estimate of the full-batch one.
    validate scores parameters on a held-out split of 4 * n_samples points
    from the same blobs.
    """
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    if not (1 <= batch_size <= n_samples):
        raise ValueError(
            f"batch_size must be in [1, n_samples={n_samples}], got {batch_size}"
        )
    rng = rng_for(seed, "logistic-data")
    mu = rng.standard_normal(dim)
    mu *= 1.5 / np.linalg.norm(mu)

    def _blobs(n, source):
        labels = np.zeros(n)
        labels[: n // 2] = 1.0
        features = source.standard_normal((n, dim)) + np.where(
            labels[:, None] > 0.5, mu, -mu
        )
        return features, labels

    features, labels = _blobs(n_samples, rng)
    val_features, val_labels = _blobs(4 * n_samples, rng_for(seed, "logistic-val"))

    def _cross_entropy(theta, xb, yb):
        logits = xb @ theta
        # mean of log(1 + exp(-sign * logit)), computed stably
        signs = 2.0 * yb - 1.0
        return float(np.mean(np.logaddexp(0.0, -signs * logits)))

    def eval_fn(params, batch_seed=None):
        theta = np.asarray(params, dtype=np.float64)
        if batch_seed is None:
            xb, yb = features, labels
        else:
            idx = rng_for(seed, "logistic-batch", batch_seed).choice(
                n_samples, size=batch_size, replace=False
            )
            xb, yb = features[idx], labels[idx]
        loss = _cross_entropy(theta, xb, yb)
        probs = 1.0 / (1.0 + np.exp(-(xb @ theta)))
        grad = xb.T @ (probs - yb) / len(yb)
        return loss, grad

    def init_fn(run_seed):
        return rng_for(run_seed, "init-logistic", seed).standard_normal(dim)

    def validate_fn(params):
        theta = np.asarray(params, dtype=np.float64)
        return _cross_entropy(theta, val_features, val_labels)

    return Problem(
        name="logistic_regression",
        dim=dim,
        deterministic=False,
        eval=eval_fn,
        init=init_fn,
        validate=validate_fn,
    )


def tiny_mlp(
    in_dim: int,
    hidden_dim: int,
    n_samples: int,
    batch_size: int,
    seed: int = 0,
    teacher_scale: float = 1.0,
) -> Problem:
    """One-hidden-layer tanh regressor fit to a fixed random teacher network.

    Targets are the outputs of a teacher with the same architecture, so the
    global minimum (loss 0) is attainable and a student placed at the teacher
    weights has zero gradient. Loss is 0.5 * mean squared residual; gradients
    come from manual backpropagation. Flat parameter layout:
    [W1 (hidden_dim x in_dim), b1, w2, b2].

    teacher_scale > 1 draws the teacher weights at a larger scale, making the
    target function depend on saturated units; fitting it then needs larger
    learning rates, which sharpens how early-step overshoot shows up in the
    final loss. validate scores parameters on 4 * n_samples held-out inputs
    labeled by the same teacher.
    """
    if in_dim < 1 or hidden_dim < 1:
        raise ValueError(f"in_dim and hidden_dim must be >= 1, got {in_dim}, {hidden_dim}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if not (1 <= batch_size <= n_samples):
        raise ValueError(
            f"batch_size must be in [1, n_samples={n_samples}], got {batch_size}"
        )
    if not (teacher_scale > 0.0):
        raise ValueError(f"teacher_scale must be > 0, got {teacher_scale}")
    dim = hidden_dim * in_dim + hidden_dim + hidden_dim + 1
    rng = rng_for(seed, "mlp-data")
    inputs = rng.standard_normal((n_samples, in_dim))
    teacher = rng.standard_normal(dim) / math.sqrt(in_dim) * teacher_scale

    def unpack(theta):
        ofs = hidden_dim * in_dim
        w1 = theta[:ofs].reshape(hidden_dim, in_dim)
        b1 = theta[ofs : ofs + hidden_dim]
        w2 = theta[ofs + hidden_dim : ofs + 2 * hidden_dim]
        b2 = theta[-1]
        return w1, b1, w2, b2

    def forward(theta, xb):
        w1, b1, w2, b2 = unpack(theta)
        z = xb @ w1.T + b1
        a = np.tanh(z)
        return a @ w2 + b2, a

    targets = forward(teacher, inputs)[0]
    val_inputs = rng_for(seed, "mlp-val").standard_normal((4 * n_samples, in_dim))
    val_targets = forward(teacher, val_inputs)[0]

    def eval_fn(params, batch_seed=None):
        theta = np.asarray(params, dtype=np.float64)
        if batch_seed is None:
            xb, yb = inputs, targets
        else:
            idx = rng_for(seed, "mlp-batch", batch_seed).choice(
                n_samples, size=batch_size, replace=False
            )
            xb, yb = inputs[idx], targets[idx]
        pred, a = forward(theta, xb)
        residual = pred - yb
        loss = 0.5 * float(np.mean(residual * residual))
        w1, b1, w2, b2 = unpack(theta)
        dpred = residual / len(yb)
        dw2 = a.T @ dpred
        db2 = float(np.sum(dpred))
        dz = (dpred[:, None] * w2) * (1.0 - a * a)
        dw1 = dz.T @ xb
        db1 = dz.sum(axis=0)
        grad = np.concatenate([dw1.ravel(), db1, dw2, [db2]])
        return loss, grad

    def init_fn(run_seed):
        scale = 1.0 / math.sqrt(in_dim)
        return rng_for(run_seed, "init-mlp", seed).standard_normal(dim) * scale

    def validate_fn(params):
        theta = np.asarray(params, dtype=np.float64)
        residual = forward(theta, val_inputs)[0] - val_targets
        return 0.5 * float(np.mean(residual * residual))

    return Problem(
        name="tiny_mlp", dim=dim, deterministic=False, eval=eval_fn,
        init=init_fn, validate=validate_fn,
    )


def finite_diff_grad(
    problem: Problem,
    params: np.ndarray,
    h: float = 1e-5,
    batch_seed: int | None = None,
) -> np.ndarray:
    """Central-difference gradient oracle, (f(x+h e_i) - f(x-h e_i)) / 2h.

    batch_seed is held fixed across all evaluations so stochastic problems
    are differentiated on one consistent minibatch (None = full batch).
    """
    if not (h > 0.0):
        raise ValueError(f"finite-difference step h must be > 0, got {h}")
    params = np.asarray(params, dtype=np.float64)
    grad = np.empty_like(params)
    for i in range(params.size):
        bumped = params.copy()
        bumped[i] = params[i] + h
        up = problem.eval(bumped, batch_seed)[0]
        bumped[i] = params[i] - h
        down = problem.eval(bumped, batch_seed)[0]
        grad[i] = (up - down) / (2.0 * h)
    return grad
