"""Static figures from adamlab sweep CSVs."""

from .figures import (
    build_effective_lr_figure,
    build_rho_decay_figure,
    build_sensitivity_figure,
    save_figure,
)
from .io import CurveRow, RhoRow, SchemaError, read_curves, read_rho

__all__ = [
    "CurveRow",
    "RhoRow",
    "SchemaError",
    "build_effective_lr_figure",
    "build_rho_decay_figure",
    "build_sensitivity_figure",
    "read_curves",
    "read_rho",
    "save_figure",
]
