"""Flower pollination optimizer with a lattice-chain convergence verifier."""

from .config import SPEC_VERSION, ExperimentConfig, parse_config, serialize_config
from .engine import (
    FpaParams,
    PollenState,
    RunResult,
    SwarmState,
    TraceRecord,
    global_pollination_step,
    hit_probability,
    init_population,
    iterate,
    iterate_simplified,
    local_pollination_step,
    run,
)
from .estimator import FlowerPollination
from .markov import (
    LatticeChainProcess,
    LatticeProblem,
    PollenStateIndex,
    TransitionModel,
    build_chain,
    builtin_lattices,
    check_closed,
    check_homogeneity,
    check_no_disjoint_closed_set,
    enumerate_pollen_states,
    ga_iteration_bound,
    group_transition_matrix,
    lattice_from_function,
    limiting_distribution,
    pollen_transition_matrix,
    simulate_mass_on_optimal,
)
from .objectives import (
    ProblemSpec,
    clamp_to_bounds,
    get_problem,
    in_optimal_region,
    problem_names,
)
from .rng import LevyParams, RandomSource, fit_tail_slope, mantegna_sigma
from .verify import run_verification

__version__ = "0.1.0"

__all__ = [
    "SPEC_VERSION",
    "ExperimentConfig",
    "FlowerPollination",
    "FpaParams",
    "LatticeChainProcess",
    "LatticeProblem",
    "LevyParams",
    "PollenState",
    "PollenStateIndex",
    "ProblemSpec",
    "RandomSource",
    "RunResult",
    "SwarmState",
    "TraceRecord",
    "TransitionModel",
    "build_chain",
    "builtin_lattices",
    "check_closed",
    "check_homogeneity",
    "check_no_disjoint_closed_set",
    "clamp_to_bounds",
    "enumerate_pollen_states",
    "fit_tail_slope",
    "ga_iteration_bound",
    "get_problem",
    "global_pollination_step",
    "group_transition_matrix",
    "hit_probability",
    "in_optimal_region",
    "init_population",
    "iterate",
    "iterate_simplified",
    "lattice_from_function",
    "limiting_distribution",
    "local_pollination_step",
    "mantegna_sigma",
    "parse_config",
    "pollen_transition_matrix",
    "problem_names",
    "run",
    "run_verification",
    "serialize_config",
    "simulate_mass_on_optimal",
]
