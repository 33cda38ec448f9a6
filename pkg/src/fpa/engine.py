"""Flower pollination optimizer: full and simplified variants.

The full variant mixes two moves, chosen per pollen per iteration by a switch
probability p: a global move that travels toward the best-known solution with
a heavy-tailed step, and a local move along the difference of two random
population members.  The simplified variant keeps only the global move and
otherwise leaves the pollen in place; it is the process the lattice chain
model in :mod:`fpa.markov` analyzes.

Both variants are elitist: each pollen remembers the best position it has
occupied, and the swarm best is the minimum over those memories, so the
best-so-far trace never increases.

State is stored as arrays over the population and each iteration is one batch
of vectorized updates.  The draw order against the random source is part of
the contract (documented on iterate and iterate_simplified), so scripted
sources can reproduce a run draw by draw.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .objectives import ProblemSpec, clamp_to_bounds, in_optimal_region
from .rng import LevyParams, RandomSource
from .validation import (
    as_float_vector,
    check_nonnegative,
    check_positive_int,
    check_probability,
    check_seed,
)

VARIANTS = ("full", "simplified")


@dataclass(frozen=True)
class FpaParams:
    """Run parameters.

    flip_branch inverts the switch test (move on r >= p instead of r < p) in
    both variants; it exists so the effect of reading the branch condition
    the other way can be measured, and is off by default.  With
    levy_per_coordinate off, a global move scales every coordinate of the
    difference to the best by one shared step instead of one per coordinate.
    """

    population_size: int = 20
    switch_probability: float = 0.8
    step_scale: float = 0.1
    levy: LevyParams = field(default_factory=LevyParams)
    max_iterations: int = 1000
    seed: int = 1
    variant: str = "full"
    accept_on_equal: bool = True
    flip_branch: bool = False
    levy_per_coordinate: bool = True

    def __post_init__(self):
        check_positive_int(self.population_size, "population_size")
        check_probability(self.switch_probability, "switch_probability")
        check_nonnegative(self.step_scale, "step_scale")
        check_positive_int(self.max_iterations, "max_iterations")
        check_seed(self.seed)
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")


@dataclass(frozen=True)
class PollenState:
    """Read-only view of one pollen: position x and remembered best g."""

    position: np.ndarray
    fitness: float
    personal_best: np.ndarray
    personal_best_fitness: float


class SwarmState:
    """Population arrays plus the swarm best and counters.

    positions and personal_bests have shape (n, d); fitness and
    personal_best_fitness have shape (n,).  best_fitness equals
    min(personal_best_fitness) at all times, with ties resolved to the
    lowest pollen index.
    """

    def __init__(self, positions: np.ndarray, fitness: np.ndarray):
        self.positions = np.array(positions, dtype=float)
        self.fitness = np.array(fitness, dtype=float)
        self.personal_bests = self.positions.copy()
        self.personal_best_fitness = self.fitness.copy()
        self.iteration = 0
        self.evaluations = int(self.fitness.size)
        self._refresh_best()

    def _refresh_best(self):
        i = int(np.argmin(self.personal_best_fitness))
        self.best_index = i
        self.best_position = self.personal_bests[i].copy()
        self.best_fitness = float(self.personal_best_fitness[i])

    @property
    def population_size(self) -> int:
        return self.positions.shape[0]

    def pollen(self, i: int) -> PollenState:
        return PollenState(
            position=self.positions[i].copy(),
            fitness=float(self.fitness[i]),
            personal_best=self.personal_bests[i].copy(),
            personal_best_fitness=float(self.personal_best_fitness[i]),
        )


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    best_fitness: float
    evaluations: int


@dataclass(frozen=True)
class RunResult:
    """Outcome of one seeded run: per-iteration trace plus the final best."""

    problem_name: str
    dimension: int
    params: FpaParams
    trace: tuple[TraceRecord, ...]
    best_position: np.ndarray
    best_fitness: float
    evaluations: int
    wall_time_s: float

    def trace_rows(self) -> list[tuple[int, float, int]]:
        return [(r.iteration, r.best_fitness, r.evaluations) for r in self.trace]

    def summary_dict(self) -> dict:
        """JSON-ready summary.  Deterministic for a fixed (problem, params):
        wall time is reported separately, never serialized."""
        p = self.params
        return {
            "problem": self.problem_name,
            "dimension": self.dimension,
            "seed": p.seed,
            "params": {
                "population_size": p.population_size,
                "switch_probability": p.switch_probability,
                "step_scale": p.step_scale,
                "levy_tail_exponent": p.levy.tail_exponent,
                "levy_min_step": p.levy.min_step,
                "levy_scale": p.levy.scale,
                "max_iterations": p.max_iterations,
                "variant": p.variant,
                "accept_on_equal": p.accept_on_equal,
                "flip_branch": p.flip_branch,
                "levy_per_coordinate": p.levy_per_coordinate,
            },
            "best_position": [float(v) for v in self.best_position],
            "best_fitness": self.best_fitness,
            "evaluations": self.evaluations,
        }


def init_population(
    problem: ProblemSpec, params: FpaParams, source: RandomSource
) -> SwarmState:
    """Uniform positions in the box, evaluated; bests seeded from them."""
    n, d = params.population_size, problem.dimension
    u = source.uniform_matrix(n, d)
    positions = problem.lower + u * (problem.upper - problem.lower)
    return SwarmState(positions, problem.evaluate(positions))


def global_pollination_step(
    x, g_star, problem: ProblemSpec, params: FpaParams, source: RandomSource
) -> np.ndarray:
    """One global move: x + gamma * L (*) (g_star - x), clamped to the box.

    L is a vector of signed heavy-tailed steps, one per coordinate, and (*)
    is the elementwise product.
    """
    x = as_float_vector(x, problem.dimension, "x")
    g_star = as_float_vector(g_star, problem.dimension, "g_star")
    if params.levy_per_coordinate:
        step = source.levy_vector(params.levy, problem.dimension)
    else:
        step = source.levy_step(params.levy)
    candidate = x + params.step_scale * step * (g_star - x)
    return clamp_to_bounds(candidate, problem)


def local_pollination_step(
    x, x_j, x_k, problem: ProblemSpec, source: RandomSource
) -> np.ndarray:
    """One local move: x + U * (x_j - x_k) with scalar U ~ Uniform[0,1)."""
    x = as_float_vector(x, problem.dimension, "x")
    x_j = as_float_vector(x_j, problem.dimension, "x_j")
    x_k = as_float_vector(x_k, problem.dimension, "x_k")
    u = source.uniform()
    return clamp_to_bounds(x + u * (x_j - x_k), problem)


def _accept(cand_fitness, cur_fitness, accept_on_equal: bool) -> np.ndarray:
    if accept_on_equal:
        return cand_fitness <= cur_fitness
    return cand_fitness < cur_fitness


def _update_bests(state: SwarmState, rows: np.ndarray):
    """Fold the current positions of the given rows into the best memories."""
    improved = rows[
        state.fitness[rows] <= state.personal_best_fitness[rows]
    ]
    state.personal_bests[improved] = state.positions[improved]
    state.personal_best_fitness[improved] = state.fitness[improved]
    state._refresh_best()


def iterate(
    state: SwarmState, problem: ProblemSpec, params: FpaParams, source: RandomSource
) -> SwarmState:
    """One full-variant iteration, in place.

    Every pollen draws r and takes the global branch when r < p (inverted
    under flip_branch), else the local branch.  All moves aim at the swarm
    best as of the start of the iteration; bests refresh once at the end.

    Draw order: uniform_vec(n) for the branch draws; levy_matrix(levy, m, c)
    for the m global rows (c = d per-coordinate, 1 shared); partner_pairs(m', n)
    then uniform_vec(m') for the m' local rows.
    """
    n, d = state.population_size, problem.dimension
    p = params.switch_probability
    r = source.uniform_vec(n)
    global_mask = (r >= p) if params.flip_branch else (r < p)
    g_rows = np.flatnonzero(global_mask)
    l_rows = np.flatnonzero(~global_mask)

    candidates = state.positions.copy()
    best = state.best_position
    cols = d if params.levy_per_coordinate else 1
    steps = source.levy_matrix(params.levy, g_rows.size, cols)
    candidates[g_rows] += params.step_scale * steps * (best - state.positions[g_rows])
    j, k = source.partner_pairs(l_rows.size, n)
    u = source.uniform_vec(l_rows.size)
    candidates[l_rows] += u[:, None] * (state.positions[j] - state.positions[k])

    candidates = clamp_to_bounds(candidates, problem)
    cand_fitness = problem.evaluate(candidates)
    state.evaluations += n
    accepted = _accept(cand_fitness, state.fitness, params.accept_on_equal)
    state.positions[accepted] = candidates[accepted]
    state.fitness[accepted] = cand_fitness[accepted]
    _update_bests(state, np.flatnonzero(accepted))
    state.iteration += 1
    return state


def iterate_simplified(
    state: SwarmState, problem: ProblemSpec, params: FpaParams, source: RandomSource
) -> SwarmState:
    """One simplified-variant iteration, in place.

    Each pollen moves with probability p (global move only) and otherwise
    stays put; only pollens that moved are re-evaluated, so the evaluation
    counter advances by the number of moved pollens.

    Draw order: uniform_vec(n) for the move draws, then levy_matrix(levy,
    m, c) for the m moved rows (c = d per-coordinate, 1 shared).
    """
    n, d = state.population_size, problem.dimension
    p = params.switch_probability
    r = source.uniform_vec(n)
    moved_mask = (r >= p) if params.flip_branch else (r < p)
    rows = np.flatnonzero(moved_mask)

    cols = d if params.levy_per_coordinate else 1
    steps = source.levy_matrix(params.levy, rows.size, cols)
    candidates = (
        state.positions[rows]
        + params.step_scale * steps * (state.best_position - state.positions[rows])
    )
    candidates = clamp_to_bounds(candidates, problem)
    cand_fitness = problem.evaluate(candidates)
    state.evaluations += rows.size
    accepted = _accept(cand_fitness, state.fitness[rows], params.accept_on_equal)
    acc_rows = rows[accepted]
    state.positions[acc_rows] = candidates[accepted]
    state.fitness[acc_rows] = cand_fitness[accepted]
    _update_bests(state, acc_rows)
    state.iteration += 1
    return state


def run(problem: ProblemSpec, params: FpaParams) -> RunResult:
    """Initialize, run max_iterations of the selected variant, trace each step.

    The trace has max_iterations + 1 records; record 0 is the initial state.
    """
    started = time.perf_counter()
    source = RandomSource(params.seed)
    state = init_population(problem, params, source)
    step = iterate if params.variant == "full" else iterate_simplified
    trace = [TraceRecord(0, state.best_fitness, state.evaluations)]
    for _ in range(params.max_iterations):
        step(state, problem, params, source)
        trace.append(TraceRecord(state.iteration, state.best_fitness, state.evaluations))
    return RunResult(
        problem_name=problem.name,
        dimension=problem.dimension,
        params=params,
        trace=tuple(trace),
        best_position=state.best_position,
        best_fitness=state.best_fitness,
        evaluations=state.evaluations,
        wall_time_s=time.perf_counter() - started,
    )


def hit_probability(
    problem: ProblemSpec,
    params: FpaParams,
    epsilon: float,
    num_runs: int,
    seed_base: int = 1,
) -> float:
    """Fraction of independent runs whose final best lands near the optimum.

    Runs use seeds seed_base .. seed_base + num_runs - 1; success is
    membership of the final best fitness in the epsilon region of the
    problem optimum.
    """
    check_positive_int(num_runs, "num_runs")
    hits = 0
    for offset in range(num_runs):
        result = run(problem, replace(params, seed=seed_base + offset))
        if in_optimal_region(result.best_fitness, problem, epsilon):
            hits += 1
    return hits / num_runs
