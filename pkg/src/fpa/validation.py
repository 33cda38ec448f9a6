"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numbers

import numpy as np


def as_float_vector(x, dimension: int | None = None, name: str = "x") -> np.ndarray:
    """Coerce to a 1-D float array, optionally enforcing its length."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if dimension is not None and arr.shape[0] != dimension:
        raise ValueError(f"{name} must have length {dimension}, got {arr.shape[0]}")
    return arr


def check_probability(value, name: str = "p") -> float:
    if not isinstance(value, numbers.Real) or not 0.0 <= float(value) <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return float(value)


def check_nonnegative(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or not float(value) >= 0.0:
        raise ValueError(f"{name} must be nonnegative, got {value!r}")
    return float(value)


def check_positive(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or not float(value) > 0.0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return float(value)


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, numbers.Integral) or int(value) < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_seed(value, name: str = "seed") -> int:
    if not isinstance(value, numbers.Integral) or not 0 <= int(value) < 2**64:
        raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
    return int(value)
