"""Figure builders.

Each build_* function returns a matplotlib Figure; save_figure writes it
with settings that make SVG output byte-reproducible (fixed hash salt, no
date metadata). plotkit only reads its inputs; it never rewrites a CSV.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .io import CurveRow, RhoRow, SchemaError

__all__ = [
    "build_effective_lr_figure",
    "build_rho_decay_figure",
    "build_sensitivity_figure",
    "save_figure",
]

ON_COLOR = "tab:orange"
OFF_COLOR = "tab:blue"


def save_figure(fig, out_path) -> None:
    """Write the figure; SVG output is byte-stable for identical inputs."""
    metadata = {"Date": None} if str(out_path).endswith(".svg") else None
    with plt.rc_context({"svg.hashsalt": "plotkit"}):
        fig.savefig(out_path, metadata=metadata)
    plt.close(fig)


def build_sensitivity_figure(rows: list[CurveRow]):
    """Final loss vs peak lr, one panel per (beta pair, schedule).

    Bias correction on/off are two series with seed-std error bars; x is
    always log-scaled. Learning rates where some seeds diverged are flagged
    with a cross at the top of the panel.
    """
    panels: dict[tuple, dict[bool, list[CurveRow]]] = {}
    for row in rows:
        key = (row.beta1, row.beta2, row.schedule)
        panels.setdefault(key, {}).setdefault(row.bias_correction, []).append(row)
    n = len(panels)
    ncols = min(2, n)
    nrows = math.ceil(n / ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(5.5 * ncols, 4 * nrows),
                             squeeze=False)
    for ax in axes.ravel()[n:]:
        ax.set_visible(False)
    for ax, key in zip(axes.ravel(), sorted(panels)):
        beta1, beta2, schedule = key
        finite_means = []
        for flag, label, color in ((True, "bias correction on", ON_COLOR),
                                   (False, "bias correction off", OFF_COLOR)):
            series = sorted(panels[key].get(flag, []), key=lambda r: r.peak_lr)
            scored = [r for r in series if r.mean_final_loss is not None]
            if scored:
                ax.errorbar(
                    [r.peak_lr for r in scored],
                    [r.mean_final_loss for r in scored],
                    yerr=[r.std_final_loss or 0.0 for r in scored],
                    label=label, color=color, marker="o", capsize=3,
                )
                finite_means += [r.mean_final_loss for r in scored]
        flagged = sorted({r.peak_lr for rs in panels[key].values()
                          for r in rs if r.n_diverged > 0})
        if flagged:
            top = max(finite_means) if finite_means else 1.0
            ax.scatter(flagged, [top] * len(flagged), marker="x", color="red",
                       zorder=5, label="diverged seeds")
        ax.set_xscale("log")
        ax.set_xlabel("peak learning rate")
        ax.set_ylabel("final loss")
        ax.set_title(f"beta1={beta1:g}, beta2={beta2:g}, {schedule}")
        ax.legend()
    fig.tight_layout()
    return fig


def build_effective_lr_figure(traces: list[tuple[str, list[RhoRow]]],
                              log_x: bool = False):
    """Overlay effective learning rates from two (or more) rho.csv traces.

    All traces must cover the same step range.
    """
    ranges = {tuple(r.step for r in rows) for _, rows in traces}
    if len(ranges) != 1:
        spans = [f"{label}: steps {rows[0].step}..{rows[-1].step} ({len(rows)})"
                 for label, rows in traces]
        raise SchemaError("step ranges differ across traces: " + "; ".join(spans))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, rows in traces:
        ax.plot([r.step for r in rows], [r.effective_lr for r in rows],
                label=label)
    _, first_rows = traces[0]
    ax.plot([r.step for r in first_rows], [r.lr for r in first_rows],
            color="gray", linestyle="--", label="scheduled lr")
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel("step")
    ax.set_ylabel("effective learning rate")
    ax.legend()
    fig.tight_layout()
    return fig


def build_rho_decay_figure(betas: list[float], steps: int, log_x: bool = False):
    """Bias-correction factor (1 - beta^t)^(-1/2) for beta1 = beta2 = beta.

    Every curve starts at (1 - beta)^(-1/2) >= 1 and decays toward 1; larger
    beta decays more slowly.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    for beta in betas:
        if not (0.0 <= beta < 1.0):
            raise ValueError(f"beta must be in [0, 1), got {beta}")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ts = list(range(1, steps + 1))
    for beta in betas:
        values = [(1.0 - beta**t) ** -0.5 for t in ts]
        ax.plot(ts, values, label=f"beta={beta:g}")
    if log_x:
        ax.set_xscale("log")
    ax.axhline(1.0, color="gray", linestyle=":", linewidth=1)
    ax.set_xlabel("step")
    ax.set_ylabel("bias-correction factor")
    ax.legend()
    fig.tight_layout()
    return fig
