"""Command-line interface.

Commands: run (single run), sweep (grid from a config file), rho-trace
(effective learning-rate table), check-equivalence, summarize (records into
sensitivity curves). Exit codes: 0 success, 1 configuration error, 2
equivalence-check failure.
"""

import sys
from pathlib import Path

import click

from .configfile import load_sweep_spec
from .harness import build_schedule, check_equivalence, run, summarize, sweep
from .optim import AdamConfig
from .records import (
    ConfigError,
    ProblemSpec,
    read_runs_csv,
    write_curves_csv,
    write_rho_csv,
    write_runs_csv,
    write_trace_csv,
)
from .schedules import effective_lr_trace

CONFIG_ERROR, CHECK_FAILED = 1, 2


def _fail_config(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(CONFIG_ERROR)


@click.group()
def main():
    """AdamW ablation harness: bias correction as a learning-rate factor."""


def _schedule_options(fn):
    fn = click.option("--schedule", "schedule_kind", default="constant",
                      type=click.Choice(["constant", "warmup-cosine"]),
                      show_default=True)(fn)
    fn = click.option("--warmup-fraction", default=0.10, show_default=True)(fn)
    return fn


def _optimizer_options(fn):
    fn = click.option("--beta1", default=0.9, show_default=True)(fn)
    fn = click.option("--beta2", default=0.999, show_default=True)(fn)
    fn = click.option("--epsilon", default=1e-8, show_default=True)(fn)
    fn = click.option("--weight-decay", default=0.0, show_default=True)(fn)
    fn = click.option("--clip-norm", default=1.0, show_default=True,
                      help="global L2 clip threshold; 0 disables")(fn)
    fn = click.option("--bias-correction/--no-bias-correction", default=True,
                      show_default=True)(fn)
    return fn


@main.command("run")
@click.option("--problem", "problem_text", required=True,
              help="e.g. 'quadratic(dim=10,condition_number=100.0,seed=3)'")
@click.option("--lr", required=True, type=float)
@click.option("--steps", required=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
@_schedule_options
@_optimizer_options
def run_command(problem_text, lr, steps, seed, out_dir, schedule_kind,
                warmup_fraction, beta1, beta2, epsilon, weight_decay,
                clip_norm, bias_correction):
    """Execute a single run; writes runs.csv and trace.csv into --out."""
    try:
        spec = ProblemSpec.from_string(problem_text)
        config = AdamConfig(
            beta1=beta1, beta2=beta2, epsilon=epsilon,
            weight_decay=weight_decay,
            clip_norm=None if clip_norm == 0.0 else clip_norm,
            bias_correction=bias_correction,
        )
        schedule = build_schedule(schedule_kind, lr, steps, warmup_fraction)
        record = run(spec.build(), config, schedule, steps, seed,
                     problem_spec=spec.to_string())
    except (ConfigError, ValueError) as exc:
        _fail_config(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_runs_csv([record], out / "runs.csv")
    write_trace_csv([record], out / "trace.csv")
    status = "diverged" if record.diverged else f"final_loss={record.final_loss!r}"
    click.echo(f"{record.run_id}: {status} ({record.wall_time_s:.2f}s)")


@main.command("sweep")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--parallelism", default=1, show_default=True, type=int)
def sweep_command(config_path, out_dir, parallelism):
    """Execute the grid in a config file; writes runs.csv and trace.csv."""
    try:
        spec = load_sweep_spec(config_path)
        records = sweep(spec, parallelism=parallelism)
    except (ConfigError, ValueError) as exc:
        _fail_config(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_runs_csv(records, out / "runs.csv")
    write_trace_csv(records, out / "trace.csv")
    n_diverged = sum(r.diverged for r in records)
    click.echo(f"{len(records)} runs ({n_diverged} diverged) -> {out / 'runs.csv'}")


@main.command("rho-trace")
@click.option("--peak-lr", default=1.0, show_default=True, type=float)
@click.option("--steps", required=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_schedule_options
@_optimizer_options
def rho_trace_command(peak_lr, steps, out_path, schedule_kind, warmup_fraction,
                      beta1, beta2, epsilon, weight_decay, clip_norm,
                      bias_correction):
    """Tabulate lr, the bias-correction factor, and the effective lr."""
    try:
        config = AdamConfig(
            beta1=beta1, beta2=beta2, epsilon=epsilon,
            weight_decay=weight_decay,
            clip_norm=None if clip_norm == 0.0 else clip_norm,
            bias_correction=bias_correction,
        )
        schedule = build_schedule(schedule_kind, peak_lr, steps, warmup_fraction)
        rows = effective_lr_trace(schedule, config, steps)
    except (ConfigError, ValueError) as exc:
        _fail_config(str(exc))
    write_rho_csv(rows, out_path)
    click.echo(f"{len(rows)} rows -> {out_path}")


@main.command("check-equivalence")
@click.option("--problem", "problem_text", required=True)
@click.option("--peak-lr", default=1e-3, show_default=True, type=float)
@click.option("--steps", default=1000, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--beta1", default=0.9, show_default=True)
@click.option("--beta2", default=0.999, show_default=True)
@click.option("--tolerance", default=1e-9, show_default=True, type=float)
@click.option("--epsilon", default=1e-8, show_default=True, type=float)
@_schedule_options
def check_equivalence_command(problem_text, peak_lr, steps, seed, beta1, beta2,
                              tolerance, epsilon, schedule_kind, warmup_fraction):
    """Verify bias correction equals the absorbed-schedule run without it."""
    try:
        spec = ProblemSpec.from_string(problem_text)
        schedule = build_schedule(schedule_kind, peak_lr, steps, warmup_fraction)
        report = check_equivalence(spec.build(), schedule, beta1, beta2, steps,
                                   seed, tolerance=tolerance, epsilon=epsilon)
    except (ConfigError, ValueError) as exc:
        _fail_config(str(exc))
    click.echo(
        f"max relative gap: eps=0 {report.max_rel_gap_eps_zero:.3e}, "
        f"eps-rescaled {report.max_rel_gap_eps_rescaled:.3e} "
        f"(tolerance {report.tolerance:.1e}, {report.steps} steps)"
    )
    if report.passed:
        click.echo("PASS")
    else:
        click.echo("FAIL")
        sys.exit(CHECK_FAILED)


@main.command("summarize")
@click.option("--runs", "runs_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def summarize_command(runs_path, out_path):
    """Aggregate runs.csv into curves.csv."""
    try:
        records = read_runs_csv(runs_path)
    except (ConfigError, ValueError) as exc:
        _fail_config(str(exc))
    curves = summarize(records)
    write_curves_csv(curves, out_path)
    click.echo(f"{sum(len(c.points) for c in curves)} curve points -> {out_path}")


if __name__ == "__main__":
    main()
