"""Readers for the harness CSV contracts.

plotkit consumes the files the sweep harness writes and nothing else; it
never imports the harness. Headers are validated exactly and mismatches
raise SchemaError with a column-by-column diagnostic.
"""

import csv
from dataclasses import dataclass

CURVES_HEADER = [
    "problem", "beta1", "beta2", "bias_correction", "schedule", "peak_lr",
    "mean_final_loss", "std_final_loss", "n_seeds", "n_diverged",
]
RHO_HEADER = ["step", "lr", "rho", "effective_lr"]

__all__ = [
    "CurveRow",
    "RhoRow",
    "SchemaError",
    "read_curves",
    "read_rho",
]


class SchemaError(ValueError):
    """A CSV does not match the documented schema."""


def _check_header(header, expected, path):
    if header == expected:
        return
    missing = [c for c in expected if header is None or c not in header]
    extra = [] if header is None else [c for c in header if c not in expected]
    parts = [f"{path}: header does not match the expected schema"]
    if missing:
        parts.append(f"missing columns: {missing}")
    if extra:
        parts.append(f"unexpected columns: {extra}")
    if not missing and not extra:
        parts.append(f"column order must be exactly {expected}")
    raise SchemaError("; ".join(parts))


def _opt_float(text):
    return None if text == "" else float(text)


@dataclass(frozen=True)
class CurveRow:
    problem: str
    beta1: float
    beta2: float
    bias_correction: bool
    schedule: str
    peak_lr: float
    mean_final_loss: float | None
    std_final_loss: float | None
    n_seeds: int
    n_diverged: int


@dataclass(frozen=True)
class RhoRow:
    step: int
    lr: float
    rho: float
    effective_lr: float


def read_curves(path) -> list[CurveRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), CURVES_HEADER, path)
        rows = []
        for raw in reader:
            data = dict(zip(CURVES_HEADER, raw))
            rows.append(CurveRow(
                problem=data["problem"],
                beta1=float(data["beta1"]),
                beta2=float(data["beta2"]),
                bias_correction=data["bias_correction"] == "true",
                schedule=data["schedule"],
                peak_lr=float(data["peak_lr"]),
                mean_final_loss=_opt_float(data["mean_final_loss"]),
                std_final_loss=_opt_float(data["std_final_loss"]),
                n_seeds=int(data["n_seeds"]),
                n_diverged=int(data["n_diverged"]),
            ))
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def read_rho(path) -> list[RhoRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), RHO_HEADER, path)
        rows = [
            RhoRow(step=int(r[0]), lr=float(r[1]), rho=float(r[2]),
                   effective_lr=float(r[3]))
            for r in reader
        ]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows
