"""Exact-arithmetic brute-force oracle for the lattice chain matrices.

Everything here is recomputed from the transition rules using Fraction
arithmetic and plain loops: cell boundaries, overlap weights, index
arithmetic, outcome enumeration.  No code is shared with fpa.markov, so an
agreement between the two routes is meaningful.

Two deliberate differences from the production route:
  * the keep branch reapplies the memory update instead of assuming it is
    a no-op, so the production shortcut is validated rather than mirrored;
  * the group matrix multiplies per-component entries directly instead of
    using a Kronecker product.

Coordinates must be exactly representable (integers, halves); Fraction(x)
of such floats is exact, so the oracle's segment arithmetic is too.
"""

from fractions import Fraction
from itertools import product


def axis_edges(coords):
    """Cell boundaries: midpoints, half-spacing extensions at both ends."""
    cs = [Fraction(float(c)) for c in coords]
    if len(cs) == 1:
        return [cs[0] - Fraction(1, 2), cs[0] + Fraction(1, 2)]
    edges = [cs[0] - (cs[1] - cs[0]) / 2]
    edges.extend((a + b) / 2 for a, b in zip(cs, cs[1:]))
    edges.append(cs[-1] + (cs[-1] - cs[-2]) / 2)
    return edges


def segment_weights(coords, a, b):
    """Per-cell weights of a uniform draw on [a, b], exact.

    a must be a grid coordinate; the covered part of the segment is then
    never empty, and weights renormalize over it.
    """
    edges = axis_edges(coords)
    lo, hi = (a, b) if a <= b else (b, a)
    if lo == hi:
        for i in range(len(coords)):
            if edges[i] <= lo < edges[i + 1]:
                w = [Fraction(0)] * len(coords)
                w[i] = Fraction(1)
                return w
        raise AssertionError("degenerate segment off the grid")
    overlaps = [
        max(Fraction(0), min(edges[i + 1], hi) - max(edges[i], lo))
        for i in range(len(coords))
    ]
    total = sum(overlaps)
    assert total > 0, "segment entirely outside the covered range"
    return [o / total for o in overlaps]


def unravel(flat, shape):
    """C-order multi-index of a flat index, first axis slowest."""
    idx = []
    for size in reversed(shape):
        idx.append(flat % size)
        flat //= size
    return tuple(reversed(idx))


def ravel(multi, shape):
    flat = 0
    for i, size in zip(multi, shape):
        flat = flat * size + i
    return flat


def stage1_weights(axes, shape, x_flat, g_flat, move_direction):
    """Stage-1 position distribution as {flat index: Fraction weight}."""
    x_sub = unravel(x_flat, shape)
    g_sub = unravel(g_flat, shape)
    per_axis = []
    for coords, xi, gi in zip(axes, x_sub, g_sub):
        x_c = Fraction(float(coords[xi]))
        g_c = Fraction(float(coords[gi]))
        target = g_c if move_direction == "toward_g" else 2 * x_c - g_c
        per_axis.append(segment_weights(coords, x_c, target))
    out = {}
    for combo in product(*(range(s) for s in shape)):
        w = Fraction(1)
        for ax, i in enumerate(combo):
            w *= per_axis[ax][i]
        if w:
            out[ravel(combo, shape)] = w
    return out


def enumerate_states(values):
    """(x, g) grid-index pairs with f(g) <= f(x), ordered by (x, g)."""
    K = len(values)
    return [(x, g) for x in range(K) for g in range(K) if values[g] <= values[x]]


def pollen_matrix(axes, values, p, move_direction="toward_g"):
    """Exact pollen-state transition matrix as nested lists of Fractions."""
    shape = tuple(len(a) for a in axes)
    K = len(values)
    states = enumerate_states(values)
    pos = {s: i for i, s in enumerate(states)}
    p = Fraction(float(p))
    matrix = [[Fraction(0)] * len(states) for _ in states]
    for row, (x, g) in enumerate(states):
        for x1, w1 in stage1_weights(axes, shape, x, g, move_direction).items():
            g1 = x1 if values[x1] <= values[g] else g
            # keep branch: reapply the memory update from (x1, g1)
            g1b = x1 if values[x1] <= values[g1] else g1
            matrix[row][pos[(x1, g1b)]] += w1 * (1 - p)
            for x2 in range(K):
                g2 = x2 if values[x2] <= values[g1] else g1
                matrix[row][pos[(x2, g2)]] += w1 * p / K
    return states, matrix


def group_matrix(pollen, n):
    """n-fold product chain as nested lists of floats.

    Group states are tuples of pollen-state indices, first component
    slowest; the (q -> q') entry is the product of component entries.
    """
    S = len(pollen)
    tuples = list(product(range(S), repeat=n))
    out = []
    for q in tuples:
        row = []
        for q2 in tuples:
            w = Fraction(1)
            for a, b in zip(q, q2):
                w *= pollen[a][b]
                if not w:
                    break
            row.append(float(w))
        out.append(row)
    return out
