"""Benchmark objective functions and the problem container.

All objectives are vectorized over the last axis: an input of shape
(..., d) yields values of shape (...).  Each named problem carries a
symmetric box domain, its known global minimum value, and a point
attaining it, used by the near-optimal region predicate and by tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .validation import check_positive, check_positive_int


def ackley(x) -> np.ndarray:
    """Nearly flat outer region with a deep well at the origin; min 0 at 0."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    rms = np.sqrt(np.sum(x * x, axis=-1) / d)
    cos_mean = np.sum(np.cos(2.0 * np.pi * x), axis=-1) / d
    return -20.0 * np.exp(-0.2 * rms) - np.exp(cos_mean) + 20.0 + np.e


def sphere(x) -> np.ndarray:
    """Sum of squares; min 0 at 0."""
    x = np.asarray(x, dtype=float)
    return np.sum(x * x, axis=-1)


def rosenbrock(x) -> np.ndarray:
    """Curved narrow valley; min 0 at the all-ones point.  Needs d >= 2."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] < 2:
        raise ValueError("rosenbrock needs dimension >= 2")
    head = x[..., :-1]
    tail = x[..., 1:]
    return np.sum((head - 1.0) ** 2 + 100.0 * (tail - head * head) ** 2, axis=-1)


def yang_forest(x) -> np.ndarray:
    """Non-smooth multimodal surface |x|_1 * exp(-sum sin(x_i^2)); min 0 at 0.

    The exponent uses sin of the squared coordinate, not of its absolute
    value; variants with sin|x_i| exist elsewhere but this is not one.
    """
    x = np.asarray(x, dtype=float)
    return np.sum(np.abs(x), axis=-1) * np.exp(-np.sum(np.sin(x * x), axis=-1))


def zakharov(x) -> np.ndarray:
    """Quadratic bowl plus quartic cross term; min 0 at 0."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    idx = np.arange(1, d + 1, dtype=float)
    s1 = np.sum(x * x, axis=-1)
    s2 = np.sum(0.5 * idx * x, axis=-1)
    return s1 + s2**2 + s2**4


@dataclass(frozen=True)
class ProblemSpec:
    """An objective with its box domain and known optimum.

    lower and upper are per-coordinate bounds (d,).  optimum_value may be
    -inf for objectives unbounded below; the near-optimal predicate then
    switches from an epsilon band above the optimum to the fixed threshold
    -large_c.  optimizer is a point attaining optimum_value (meaningless
    and unused when that value is -inf).
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    dimension: int
    lower: np.ndarray = field(repr=False)
    upper: np.ndarray = field(repr=False)
    optimum_value: float = 0.0
    optimizer: np.ndarray = field(default=None, repr=False)
    large_c: float = 1e12

    def __post_init__(self):
        check_positive_int(self.dimension, "dimension")
        check_positive(self.large_c, "large_c")
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != (self.dimension,) or upper.shape != (self.dimension,):
            raise ValueError("bounds must both have shape (dimension,)")
        if not np.all(lower < upper):
            raise ValueError("each lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if self.optimizer is not None:
            optimizer = np.asarray(self.optimizer, dtype=float)
            if optimizer.shape != (self.dimension,):
                raise ValueError("optimizer must have shape (dimension,)")
            if np.any(optimizer < lower) or np.any(optimizer > upper):
                raise ValueError("optimizer must lie within the bounds")
            object.__setattr__(self, "optimizer", optimizer)

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dimension:
            raise ValueError(
                f"last axis must have length {self.dimension}, got {x.shape[-1]}"
            )
        return self.fn(x)


# name -> (function, half-width of the symmetric box, optimizer coordinate,
# minimum dimension)
_REGISTRY: dict[str, tuple[Callable, float, float, int]] = {
    "ackley": (ackley, 32.768, 0.0, 1),
    "sphere": (sphere, 5.12, 0.0, 1),
    "rosenbrock": (rosenbrock, 5.0, 1.0, 2),
    "yang-forest": (yang_forest, float(2.0 * np.pi), 0.0, 1),
    "zakharov": (zakharov, 5.0, 0.0, 1),
}


def problem_names() -> list[str]:
    return sorted(_REGISTRY)


def get_problem(name: str, dimension: int) -> ProblemSpec:
    """Build a registered benchmark at the requested dimension."""
    check_positive_int(dimension, "dimension")
    if name not in _REGISTRY:
        raise KeyError(
            f"unknown problem {name!r}; known problems: {', '.join(problem_names())}"
        )
    fn, half_width, opt_coord, min_dim = _REGISTRY[name]
    if dimension < min_dim:
        raise ValueError(f"{name} needs dimension >= {min_dim}, got {dimension}")
    bound = np.full(dimension, half_width)
    return ProblemSpec(
        name=name,
        fn=fn,
        dimension=dimension,
        lower=-bound,
        upper=bound,
        optimum_value=0.0,
        optimizer=np.full(dimension, opt_coord),
    )


def clamp_to_bounds(x, problem: ProblemSpec) -> np.ndarray:
    """Project points onto the problem box, coordinatewise.

    NaN coordinates are rejected: a NaN is an upstream bug, and clipping
    would silently swallow it.
    """
    x = np.asarray(x, dtype=float)
    if np.isnan(x).any():
        raise ValueError("cannot clamp NaN coordinates")
    return np.clip(x, problem.lower, problem.upper)


def in_optimal_region(value, problem: ProblemSpec, epsilon: float) -> np.ndarray | bool:
    """Whether an objective value lies in the near-optimal acceptance set.

    For a finite optimum f* the set is {f < f* + epsilon} (strict).  For an
    optimum of -inf it is {f < -large_c}.  epsilon must be positive; +inf
    is allowed and accepts everything.
    """
    eps = float(epsilon)
    if not eps > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    value = np.asarray(value, dtype=float)
    if np.isneginf(problem.optimum_value):
        result = value < -problem.large_c
    else:
        result = value < problem.optimum_value + eps
    if result.ndim == 0:
        return bool(result)
    return result
