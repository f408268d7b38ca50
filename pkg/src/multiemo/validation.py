"""Input validation helpers for matrix-valued arguments.

All metric and decision-rule entry points funnel through these checks so
error messages are uniform and estimators stay sklearn-compatible.
"""

from __future__ import annotations

import numpy as np

from .errors import AlignmentError, SchemaError


def as_float_matrix(x, name: str = "X") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise SchemaError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.size and not np.isfinite(arr).all():
        raise SchemaError(f"{name} contains non-finite values")
    return arr


def check_binary(x, name: str = "matrix") -> np.ndarray:
    arr = as_float_matrix(x, name)
    if arr.size and not np.isin(arr, (0.0, 1.0)).all():
        raise SchemaError(f"{name} must contain only 0/1 values")
    return arr.astype(np.int8)


def check_unit_interval(x, name: str = "scores") -> np.ndarray:
    arr = as_float_matrix(x, name)
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise SchemaError(f"{name} values must lie in [0, 1]")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, what: str = "pred/gold") -> None:
    if a.shape != b.shape:
        raise AlignmentError(f"shape mismatch for {what}: {a.shape} vs {b.shape}")


def check_row_aligned(a: np.ndarray, b: np.ndarray, what: str = "matrices") -> None:
    if a.shape[0] != b.shape[0]:
        raise AlignmentError(
            f"row misalignment for {what}: {a.shape[0]} vs {b.shape[0]} rows"
        )
