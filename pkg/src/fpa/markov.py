"""Exact Markov chain model of the simplified optimizer on small lattices.

The simplified optimizer, restricted to a finite grid of candidate points,
is a finite Markov chain over pollen states y = (x, g): current position x
paired with remembered best g, f(g) <= f(x).  This module builds that
chain's transition matrix exactly, forms the n-pollen product chain, and
provides the checks used to certify its convergence behavior numerically:

  * the optimal state sets (pollen level R, group level H) are closed,
  * no closed set exists disjoint from the optimal set,
  * the transition law does not depend on the iteration index,
  * power iteration drives the state distribution into the optimal set,
    in agreement with direct Monte-Carlo simulation of the same process.

Each transition composes two stages.  Stage 1 moves x uniformly over the
discretized segment between x and a target point; the continuous uniform
density is mapped to cell weights proportional to the overlap of each grid
cell with the segment, renormalized.  Stage 2 keeps the position with
probability 1 - p and redraws it uniformly over the whole grid with
probability p.  After each stage the memory updates greedily: g becomes the
new position whenever its value is at least as good.

The segment target is g itself by default (move_direction "toward_g"); the
alternative "away_from_g" mirrors g across x, i.e. the segment
[x, x + (x - g)].  The closure properties hold either way because they
depend only on the greedy memory updates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .validation import check_positive_int, check_probability

MOVE_DIRECTIONS = ("toward_g", "away_from_g")

# group enumeration refusal bound; verifier problems are deliberately small
STATE_CAP = 100_000


@dataclass(frozen=True)
class LatticeProblem:
    """Finite grid of candidate points with an objective value at each.

    axes are per-dimension coordinate arrays, strictly increasing; the grid
    is their cartesian product, and values is the flat (C-order) array of
    objective values over it.  The designated optimum is the lowest flat
    index attaining the minimum value; ties in value still count as optimal
    for membership purposes, which use the value, not the index.
    """

    name: str
    axes: tuple[np.ndarray, ...]
    values: np.ndarray

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        if not axes:
            raise ValueError("need at least one axis")
        for a in axes:
            if a.ndim != 1 or a.size < 1:
                raise ValueError("each axis must be a nonempty 1-D array")
            if a.size > 1 and not np.all(np.diff(a) > 0):
                raise ValueError("axis coordinates must be strictly increasing")
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size != int(np.prod([a.size for a in axes])):
            raise ValueError("values length must equal the grid size")
        if not np.all(np.isfinite(values)):
            raise ValueError("lattice values must be finite")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    @property
    def num_points(self) -> int:
        return self.values.size

    @property
    def dimension(self) -> int:
        return len(self.axes)

    @property
    def optimum_value(self) -> float:
        return float(self.values.min())

    @property
    def optimum_index(self) -> int:
        return int(np.argmin(self.values))

    @property
    def optimal_point_indices(self) -> np.ndarray:
        """All flat indices whose value ties the minimum."""
        return np.flatnonzero(self.values == self.values.min())

    @property
    def points(self) -> np.ndarray:
        """(K, d) coordinates of every grid point, C-order."""
        grids = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([g.reshape(-1) for g in grids], axis=-1)


def lattice_from_function(name: str, axes, fn) -> LatticeProblem:
    """Evaluate fn on the grid spanned by the axes."""
    axes = tuple(np.asarray(a, dtype=float) for a in axes)
    grids = np.meshgrid(*axes, indexing="ij")
    points = np.stack([g.reshape(-1) for g in grids], axis=-1)
    return LatticeProblem(name=name, axes=axes, values=fn(points))


def builtin_lattices() -> dict[str, LatticeProblem]:
    """The stock verification problems: sum-of-squares values on small grids."""
    square = lambda pts: np.sum(pts * pts, axis=-1)
    return {
        "line3": lattice_from_function("line3", [np.arange(-1.0, 2.0)], square),
        "line5": lattice_from_function("line5", [np.arange(-2.0, 3.0)], square),
        "grid3x3": lattice_from_function(
            "grid3x3", [np.arange(-1.0, 2.0), np.arange(-1.0, 2.0)], square
        ),
    }


@dataclass(frozen=True)
class PollenStateIndex:
    """One pollen state: flat grid indices of position x and memory g."""

    x_index: int
    g_index: int


def enumerate_pollen_states(lattice: LatticeProblem) -> list[PollenStateIndex]:
    """All (x, g) index pairs with f(g) <= f(x), ordered by (x, g)."""
    vals = lattice.values
    return [
        PollenStateIndex(x, g)
        for x in range(lattice.num_points)
        for g in range(lattice.num_points)
        if vals[g] <= vals[x]
    ]


def optimal_pollen_indices(
    lattice: LatticeProblem, states: list[PollenStateIndex]
) -> np.ndarray:
    """Indices (into states) whose memory g attains the optimum value."""
    opt = lattice.optimum_value
    return np.flatnonzero([lattice.values[s.g_index] == opt for s in states])


def _axis_edges(coords: np.ndarray) -> np.ndarray:
    """Cell boundaries: midpoints between neighbors, half-spacing at the ends."""
    if coords.size == 1:
        return np.array([coords[0] - 0.5, coords[0] + 0.5])
    mids = (coords[:-1] + coords[1:]) / 2.0
    first = coords[0] - (coords[1] - coords[0]) / 2.0
    last = coords[-1] + (coords[-1] - coords[-2]) / 2.0
    return np.concatenate([[first], mids, [last]])


def _axis_segment_weights(coords: np.ndarray, a: float, b: float) -> np.ndarray:
    """Cell weights for a uniform draw on the interval between a and b.

    Weights are the per-cell overlap lengths, renormalized over the covered
    part; a degenerate interval is a point mass on its cell.  a must be a
    grid coordinate, so the covered part is never empty.
    """
    edges = _axis_edges(coords)
    lo, hi = (a, b) if a <= b else (b, a)
    if lo == hi:
        w = np.zeros(coords.size)
        w[int(np.searchsorted(edges, lo, side="right")) - 1] = 1.0
        return w
    overlap = np.clip(
        np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo), 0.0, None
    )
    total = overlap.sum()
    if total <= 0.0:
        raise ValueError("segment lies entirely outside the grid cells")
    return overlap / total


def _stage1_distribution(
    lattice: LatticeProblem, x_index: int, g_index: int, move_direction: str
) -> np.ndarray:
    """Distribution of the stage-1 position over flat grid indices."""
    x_sub = np.unravel_index(x_index, lattice.shape)
    g_sub = np.unravel_index(g_index, lattice.shape)
    per_axis = []
    for coords, xi, gi in zip(lattice.axes, x_sub, g_sub):
        x_c, g_c = coords[xi], coords[gi]
        target = g_c if move_direction == "toward_g" else 2.0 * x_c - g_c
        per_axis.append(_axis_segment_weights(coords, x_c, target))
    return reduce(np.multiply.outer, per_axis).reshape(-1)


def pollen_transition_matrix(
    lattice: LatticeProblem, p: float, move_direction: str = "toward_g"
) -> np.ndarray:
    """One-iteration transition matrix over the enumerated pollen states.

    Composes the stage-1 segment move and the stage-2 keep/perturb branch
    (keep with probability 1 - p, redraw uniformly over the grid with
    probability p), applying the greedy memory update after each stage.
    """
    check_probability(p)
    if move_direction not in MOVE_DIRECTIONS:
        raise ValueError(
            f"move_direction must be one of {MOVE_DIRECTIONS}, got {move_direction!r}"
        )
    vals = lattice.values
    states = enumerate_pollen_states(lattice)
    index = {(s.x_index, s.g_index): i for i, s in enumerate(states)}
    K = lattice.num_points
    matrix = np.zeros((len(states), len(states)))
    for row, s in enumerate(states):
        stage1 = _stage1_distribution(lattice, s.x_index, s.g_index, move_direction)
        for x1 in np.flatnonzero(stage1):
            w1 = stage1[x1]
            g1 = x1 if vals[x1] <= vals[s.g_index] else s.g_index
            # keep branch: position stays at x1
            matrix[row, index[(x1, g1)]] += w1 * (1.0 - p)
            # perturb branch: position redrawn uniformly over the grid
            for x2 in range(K):
                g2 = x2 if vals[x2] <= vals[g1] else g1
                matrix[row, index[(x2, g2)]] += w1 * p / K
    return matrix


@dataclass(frozen=True)
class TransitionModel:
    """A built chain: the n-pollen product matrix and its optimal set."""

    lattice: LatticeProblem
    n: int
    move_direction: str
    switch_probability: float
    pollen_states: tuple[PollenStateIndex, ...]
    group_states: tuple[tuple[int, ...], ...]
    matrix: np.ndarray
    h_indices: np.ndarray

    @property
    def num_states(self) -> int:
        return self.matrix.shape[0]


def group_transition_matrix(
    lattice: LatticeProblem,
    pollen_matrix: np.ndarray,
    n: int,
    p: float = float("nan"),
    move_direction: str = "toward_g",
    state_cap: int = STATE_CAP,
) -> TransitionModel:
    """n-fold product chain over tuples of pollen states.

    The entry for (q -> q') is the product of per-pollen entries.  Group
    states are tuples of pollen-state indices, first component slowest.
    The optimal set H holds every group state in which at least one
    component's memory attains the optimum value.
    """
    check_positive_int(n, "n")
    states = enumerate_pollen_states(lattice)
    S = len(states)
    if pollen_matrix.shape != (S, S):
        raise ValueError("pollen matrix shape does not match the lattice state count")
    if S**n > state_cap:
        raise ValueError(
            f"group chain would have {S**n} states, above the cap of {state_cap}; "
            "use a smaller lattice or population"
        )
    matrix = reduce(np.kron, [pollen_matrix] * n)
    group_states = tuple(itertools.product(range(S), repeat=n))
    optimal = set(optimal_pollen_indices(lattice, states).tolist())
    h_indices = np.flatnonzero(
        [any(c in optimal for c in q) for q in group_states]
    )
    return TransitionModel(
        lattice=lattice,
        n=n,
        move_direction=move_direction,
        switch_probability=p,
        pollen_states=tuple(states),
        group_states=group_states,
        matrix=matrix,
        h_indices=h_indices,
    )


def build_chain(
    lattice: LatticeProblem,
    p: float,
    n: int = 1,
    move_direction: str = "toward_g",
    state_cap: int = STATE_CAP,
) -> TransitionModel:
    """Convenience: pollen matrix plus n-fold product in one call."""
    pollen = pollen_transition_matrix(lattice, p, move_direction)
    return group_transition_matrix(
        lattice, pollen, n, p=p, move_direction=move_direction, state_cap=state_cap
    )


@dataclass(frozen=True)
class ClosedSetReport:
    is_closed: bool
    total_outflow: float


def check_closed(matrix: np.ndarray, inside_indices) -> ClosedSetReport:
    """Total probability mass leaking from the index set in one step.

    The set is closed exactly when that outflow is 0.0, with no tolerance:
    closure is a support property, not an approximation.
    """
    inside = np.zeros(matrix.shape[0], dtype=bool)
    inside[np.asarray(inside_indices, dtype=int)] = True
    if inside.all():
        return ClosedSetReport(is_closed=True, total_outflow=0.0)
    outflow = float(matrix[np.ix_(inside, ~inside)].sum())
    return ClosedSetReport(is_closed=outflow == 0.0, total_outflow=outflow)


@dataclass(frozen=True)
class DisjointClosedSetReport:
    holds: bool
    offending_set: tuple[int, ...] | None


def check_no_disjoint_closed_set(
    matrix: np.ndarray, target_indices
) -> DisjointClosedSetReport:
    """Whether every state outside the target can reach it.

    Reachability is over the support graph (edges where the transition
    probability is positive).  If some state cannot reach the target, its
    forward closure is returned as a witness: a closed set disjoint from
    the target.
    """
    S = matrix.shape[0]
    support = matrix > 0.0
    can_reach = np.zeros(S, dtype=bool)
    can_reach[np.asarray(target_indices, dtype=int)] = True
    while True:
        expanded = can_reach | support[:, can_reach].any(axis=1)
        if np.array_equal(expanded, can_reach):
            break
        can_reach = expanded
    if can_reach.all():
        return DisjointClosedSetReport(holds=True, offending_set=None)
    start = int(np.flatnonzero(~can_reach)[0])
    closure = np.zeros(S, dtype=bool)
    closure[start] = True
    while True:
        expanded = closure | support[closure].any(axis=0)
        if np.array_equal(expanded, closure):
            break
        closure = expanded
    return DisjointClosedSetReport(
        holds=False, offending_set=tuple(np.flatnonzero(closure).tolist())
    )


@dataclass(frozen=True)
class LimitingReport:
    distribution: np.ndarray
    mass_on_target: np.ndarray  # length steps + 1, index 0 = initial mass


def limiting_distribution(
    matrix: np.ndarray, initial, steps: int, target_indices=None
) -> LimitingReport:
    """Distribution after the given number of steps, by repeated multiplication.

    Also tracks the probability mass on the target index set after every
    step; steps = 0 returns the initial distribution unchanged.
    """
    v = np.asarray(initial, dtype=float).copy()
    if v.shape != (matrix.shape[0],):
        raise ValueError("initial distribution length must match the state count")
    if np.any(v < 0) or abs(v.sum() - 1.0) > 1e-9:
        raise ValueError("initial must be a probability distribution")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    target = np.asarray(
        [] if target_indices is None else target_indices, dtype=int
    )
    mass = np.empty(steps + 1)
    mass[0] = v[target].sum()
    for k in range(1, steps + 1):
        v = v @ matrix
        mass[k] = v[target].sum()
    return LimitingReport(distribution=v, mass_on_target=mass)


class LatticeChainProcess:
    """Direct simulation of the single-pollen lattice process.

    This is an independent route to the same law as pollen_transition_matrix:
    stage 1 draws a continuous uniform point on the segment and maps it to
    the nearest grid cell (redrawing the rare draws that fall outside the
    cell coverage, which only happens for the mirrored segment direction);
    stage 2 branches on a fresh uniform.  The step function takes the
    iteration index so that a check can measure whether the law depends on
    it; this process never uses it.
    """

    def __init__(
        self, lattice: LatticeProblem, p: float, move_direction: str = "toward_g"
    ):
        check_probability(p)
        if move_direction not in MOVE_DIRECTIONS:
            raise ValueError(
                f"move_direction must be one of {MOVE_DIRECTIONS}, got {move_direction!r}"
            )
        self.lattice = lattice
        self.p = p
        self.move_direction = move_direction
        self.states = enumerate_pollen_states(lattice)
        self._x = np.array([s.x_index for s in self.states])
        self._g = np.array([s.g_index for s in self.states])
        lookup = np.full((lattice.num_points, lattice.num_points), -1)
        for i, s in enumerate(self.states):
            lookup[s.x_index, s.g_index] = i
        self._lookup = lookup
        self._edges = [_axis_edges(a) for a in lattice.axes]
        self._kernel = pollen_transition_matrix(lattice, p, move_direction)

    @property
    def n_states(self) -> int:
        return len(self.states)

    def kernel(self, t: int) -> np.ndarray:
        """Analytic one-step matrix at iteration t (independent of t here)."""
        return self._kernel

    def _stage1_axis(
        self, coords: np.ndarray, edges: np.ndarray, x_c, g_c, rng
    ) -> np.ndarray:
        """Nearest-cell index of a uniform draw between x_c and its target."""
        target = g_c if self.move_direction == "toward_g" else 2.0 * x_c - g_c
        lo = np.minimum(x_c, target)
        hi = np.maximum(x_c, target)
        out = np.empty(x_c.shape[0], dtype=int)
        todo = np.arange(x_c.shape[0])
        while todo.size:
            u = lo[todo] + rng.random(todo.size) * (hi[todo] - lo[todo])
            cell = np.searchsorted(edges, u, side="right") - 1
            ok = (u >= edges[0]) & (u < edges[-1])
            out[todo[ok]] = cell[ok]
            todo = todo[~ok]
        return out

    def step_from(self, state_indices: np.ndarray, t: int, rng) -> np.ndarray:
        """Advance each given pollen state by one iteration; returns indices."""
        del t
        vals = self.lattice.values
        x = self._x[state_indices]
        g = self._g[state_indices]
        x_sub = np.unravel_index(x, self.lattice.shape)
        g_sub = np.unravel_index(g, self.lattice.shape)
        new_sub = [
            self._stage1_axis(coords, edges, coords[xi], coords[gi], rng)
            for coords, edges, xi, gi in zip(
                self.lattice.axes, self._edges, x_sub, g_sub
            )
        ]
        x1 = np.ravel_multi_index(new_sub, self.lattice.shape)
        g1 = np.where(vals[x1] <= vals[g], x1, g)
        perturb = rng.random(x1.size) < self.p
        x2 = np.where(
            perturb, rng.integers(0, self.lattice.num_points, x1.size), x1
        )
        g2 = np.where(vals[x2] <= vals[g1], x2, g1)
        return self._lookup[x2, g2]


@dataclass(frozen=True)
class HomogeneityReport:
    holds: bool
    analytic_time_invariant: bool
    sample_times: tuple[int, ...]
    num_samples: int
    max_abs_vs_analytic: float
    max_abs_between_times: float
    entries_outside_tolerance: int


def check_homogeneity(
    process, sample_times, num_samples: int, rng
) -> HomogeneityReport:
    """Empirical test that the one-step law does not depend on the iteration.

    At each sample time, num_samples one-step transitions are simulated from
    every state and tallied into an empirical matrix.  The report compares
    each empirical matrix against the analytic kernel at that time and the
    empirical matrices against each other, entrywise, with a tolerance of
    three binomial standard errors; it also records whether the analytic
    kernels themselves are identical across the sample times.
    """
    if num_samples < 10_000:
        raise ValueError("need at least 10000 samples per time point")
    times = tuple(int(t) for t in sample_times)
    S = process.n_states
    kernels = [np.asarray(process.kernel(t)) for t in times]
    analytic_invariant = all(np.array_equal(kernels[0], k) for k in kernels[1:])

    empirical = []
    starts = np.repeat(np.arange(S), num_samples)
    for t in times:
        ends = process.step_from(starts, t, rng)
        counts = np.bincount(starts * S + ends, minlength=S * S).reshape(S, S)
        empirical.append(counts / num_samples)

    bad = 0
    max_vs_analytic = 0.0
    for kern, emp in zip(kernels, empirical):
        dev = np.abs(emp - kern)
        tol = 3.0 * np.sqrt(kern * (1.0 - kern) / num_samples)
        bad += int(np.sum(dev > tol))
        max_vs_analytic = max(max_vs_analytic, float(dev.max()))

    max_between = 0.0
    for (ka, ea), (kb, eb) in itertools.combinations(zip(kernels, empirical), 2):
        dev = np.abs(ea - eb)
        tol = 3.0 * np.sqrt((ka * (1.0 - ka) + kb * (1.0 - kb)) / num_samples)
        bad += int(np.sum(dev > tol))
        max_between = max(max_between, float(dev.max()))

    return HomogeneityReport(
        holds=analytic_invariant and bad == 0,
        analytic_time_invariant=analytic_invariant,
        sample_times=times,
        num_samples=num_samples,
        max_abs_vs_analytic=max_vs_analytic,
        max_abs_between_times=max_between,
        entries_outside_tolerance=bad,
    )


def simulate_mass_on_optimal(
    lattice: LatticeProblem,
    p: float,
    n: int,
    steps: int,
    num_trajectories: int,
    rng,
    move_direction: str = "toward_g",
) -> np.ndarray:
    """Monte-Carlo estimate of the mass-on-optimal-set curve.

    Simulates num_trajectories independent n-pollen groups from the uniform
    initial distribution over group states and returns, for each step count
    0..steps, the fraction whose best memory has reached the optimum value.
    Groups already at the optimum value stay there (the memory update never
    discards a best), so they are frozen rather than resimulated.
    """
    check_positive_int(n, "n")
    check_positive_int(num_trajectories, "num_trajectories")
    process = LatticeChainProcess(lattice, p, move_direction)
    opt = lattice.optimum_value
    g_vals = lattice.values[process._g]
    state = rng.integers(0, process.n_states, size=(num_trajectories, n))
    absorbed = (g_vals[state] == opt).any(axis=1)
    curve = np.empty(steps + 1)
    curve[0] = absorbed.mean()
    for k in range(1, steps + 1):
        active = np.flatnonzero(~absorbed)
        if active.size:
            flat = process.step_from(state[active].reshape(-1), k, rng)
            state[active] = flat.reshape(active.size, n)
            absorbed[active] = (g_vals[state[active]] == opt).any(axis=1)
        curve[k] = absorbed.mean()
    return curve


def ga_iteration_bound(mu: float, L: int, n: int, p: float) -> int:
    """Iteration count guaranteeing success probability p for a bit-flip search.

    For mutation rate mu over n strings of L bits, the chance of producing
    any fixed target string in one generation is at least
    q = min((1 - mu)**(n L), mu**(n L)), and ceil(ln(1 - p) / ln(1 - q))
    generations make the overall success probability at least p.
    """
    mu = float(mu)
    p = float(p)
    if not 0.0 < mu < 1.0:
        raise ValueError(f"mu must lie in (0, 1), got {mu!r}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    check_positive_int(L, "L")
    check_positive_int(n, "n")
    q = min((1.0 - mu) ** (n * L), mu ** (n * L))
    inner = 1.0 - q
    if inner <= 0.0 or inner >= 1.0:
        raise ValueError(
            "per-generation success probability underflowed; the bound's "
            "logarithm argument must lie strictly inside (0, 1)"
        )
    return math.ceil(math.log1p(-p) / math.log(inner))
