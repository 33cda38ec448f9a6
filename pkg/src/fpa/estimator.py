"""Estimator-style wrapper around the optimizer.

Exposes the optimizer through the familiar fit/get_params surface so it can
be composed with parameter search and cloning utilities.  Constructor
arguments are stored verbatim and validated at fit time, per estimator
convention; fitted results land in trailing-underscore attributes.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .engine import FpaParams, run
from .objectives import ProblemSpec
from .rng import LevyParams


class FlowerPollination(BaseEstimator):
    """Population optimizer with a scikit-learn estimator surface.

    fit(problem) runs the optimizer on a ProblemSpec and records the best
    solution found; score(problem) returns the negated best fitness so that
    larger is better, matching the estimator scoring convention.
    """

    def __init__(
        self,
        population_size: int = 20,
        switch_probability: float = 0.8,
        step_scale: float = 0.1,
        levy_tail_exponent: float = 1.5,
        levy_min_step: float = 0.01,
        levy_scale: float = 1.0,
        max_iterations: int = 1000,
        seed: int = 1,
        variant: str = "full",
        accept_on_equal: bool = True,
        flip_branch: bool = False,
        levy_per_coordinate: bool = True,
    ):
        self.population_size = population_size
        self.switch_probability = switch_probability
        self.step_scale = step_scale
        self.levy_tail_exponent = levy_tail_exponent
        self.levy_min_step = levy_min_step
        self.levy_scale = levy_scale
        self.max_iterations = max_iterations
        self.seed = seed
        self.variant = variant
        self.accept_on_equal = accept_on_equal
        self.flip_branch = flip_branch
        self.levy_per_coordinate = levy_per_coordinate

    def _build_params(self) -> FpaParams:
        return FpaParams(
            population_size=self.population_size,
            switch_probability=self.switch_probability,
            step_scale=self.step_scale,
            levy=LevyParams(
                tail_exponent=self.levy_tail_exponent,
                min_step=self.levy_min_step,
                scale=self.levy_scale,
            ),
            max_iterations=self.max_iterations,
            seed=self.seed,
            variant=self.variant,
            accept_on_equal=self.accept_on_equal,
            flip_branch=self.flip_branch,
            levy_per_coordinate=self.levy_per_coordinate,
        )

    def fit(self, problem: ProblemSpec, y=None):
        """Run the optimizer on the given problem."""
        if not isinstance(problem, ProblemSpec):
            raise TypeError(
                f"problem must be a ProblemSpec, got {type(problem).__name__}"
            )
        result = run(problem, self._build_params())
        self.result_ = result
        self.best_position_ = result.best_position
        self.best_fitness_ = result.best_fitness
        self.n_evaluations_ = result.evaluations
        self.trace_ = result.trace
        return self

    def score(self, problem=None, y=None) -> float:
        """Negated best fitness of the completed fit (larger is better)."""
        check_is_fitted(self, "best_fitness_")
        return -self.best_fitness_
