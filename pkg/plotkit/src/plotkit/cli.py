"""Command-line interface: plotkit <kind> --in ... --out ...

Kinds: sensitivity (curves.csv), effective-lr (two rho.csv traces),
rho-decay (computed from --beta/--steps). Output format follows the --out
extension; SVG is the reproducible default.
"""

import sys

import click

from .figures import (
    build_effective_lr_figure,
    build_rho_decay_figure,
    build_sensitivity_figure,
    save_figure,
)
from .io import SchemaError, read_curves, read_rho


def _fail(message):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
def main():
    """Render figures from sweep-harness CSV outputs."""


@main.command("sensitivity")
@click.option("--in", "in_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="curves.csv from `adamlab summarize`")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def sensitivity(in_path, out_path):
    """Final loss vs learning rate, one panel per (betas, schedule)."""
    try:
        rows = read_curves(in_path)
    except SchemaError as exc:
        _fail(str(exc))
    save_figure(build_sensitivity_figure(rows), out_path)
    click.echo(f"wrote {out_path}")


@main.command("effective-lr")
@click.option("--in", "in_paths", required=True, multiple=True,
              type=click.Path(exists=True, dir_okay=False),
              help="rho.csv from `adamlab rho-trace`; pass twice to overlay")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--log-x", is_flag=True, default=False)
def effective_lr(in_paths, out_path, log_x):
    """Overlay effective learning-rate traces."""
    try:
        traces = [(path, read_rho(path)) for path in in_paths]
        figure = build_effective_lr_figure(traces, log_x=log_x)
    except SchemaError as exc:
        _fail(str(exc))
    save_figure(figure, out_path)
    click.echo(f"wrote {out_path}")


@main.command("rho-decay")
@click.option("--beta", "betas", required=True, multiple=True, type=float)
@click.option("--steps", default=100, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--log-x", is_flag=True, default=False)
def rho_decay(betas, steps, out_path, log_x):
    """Bias-correction factor decay for beta1 = beta2 = beta."""
    try:
        figure = build_rho_decay_figure(list(betas), steps, log_x=log_x)
    except ValueError as exc:
        _fail(str(exc))
    save_figure(figure, out_path)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
