"""Input validation helpers used across the package.

Small check functions in the spirit of ``sklearn.utils.validation``:
each either returns a canonical ndarray or raises :class:`ValidationError`.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


def check_finite_grid(values, name: str = "values") -> np.ndarray:
    """Coerce to a 2-D float64 array with at least one row/column, all finite."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"{name} must have height >= 1 and width >= 1, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries (NaN or inf)")
    return np.ascontiguousarray(arr)


def check_binary_grid(bits, name: str = "bits") -> np.ndarray:
    """Coerce to a 2-D uint8 array containing only 0 and 1."""
    arr = np.asarray(bits)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"{name} must have height >= 1 and width >= 1, got {arr.shape}")
    if arr.dtype == bool:
        return np.ascontiguousarray(arr.astype(np.uint8))
    out = arr.astype(np.uint8, copy=True)
    if not np.array_equal(out, arr) or not np.isin(out, (0, 1)).all():
        raise ValidationError(f"{name} must contain only 0/1 values")
    return np.ascontiguousarray(out)


def check_same_shape(a: np.ndarray, b: np.ndarray, what: str = "grids") -> None:
    if a.shape != b.shape:
        raise ValidationError(f"{what} have mismatched dimensions: {a.shape} vs {b.shape}")


def check_open_unit(x: float, name: str) -> float:
    """Scalar strictly inside (0, 1); domain violations raise ValueError."""
    x = float(x)
    if not (0.0 < x < 1.0):
        raise ValueError(f"{name} must lie strictly inside (0, 1), got {x}")
    return x


def check_probability(x: float, name: str = "p") -> float:
    x = float(x)
    if not (0.0 <= x <= 1.0) or not np.isfinite(x):
        raise ValueError(f"{name} must lie in [0, 1], got {x}")
    return x
