"""Deterministic random source and heavy-tailed step sampling.

Every stochastic operation in the package draws from a :class:`RandomSource`,
a thin wrapper around a seeded PCG64 stream.  A source is owned by exactly one
run and never shared, so identical seeds reproduce identical runs bit for bit.

Draw accounting is part of the contract: each operation consumes a fixed,
documented number of generator draws, so the stream position after a call
never depends on the values that were drawn.

    uniform()                 1
    uniform_vec(m)            m
    uniform_matrix(r, c)      r * c
    integers_vec(m, high)     m
    partner_pairs(m, n)       2 * m   (0 when n == 1)
    levy_matrix(p, r, c)      r * c * (2 * MAGNITUDE_DRAWS + 1)
    levy_vector(p, d)         d * (2 * MAGNITUDE_DRAWS + 1)
    levy_step(p)              2 * MAGNITUDE_DRAWS + 1
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma_fn

from .validation import check_positive, check_positive_int, check_seed

# Candidate magnitudes consumed per emitted Levy step: the first draw plus up
# to eight resamples below the minimum-step cutoff.  If all nine fall short,
# the magnitude is clamped to the cutoff.  Always drawing the full batch keeps
# the stream advance fixed.
MAGNITUDE_DRAWS = 9


@dataclass(frozen=True)
class LevyParams:
    """Parameters of the heavy-tailed step distribution.

    tail_exponent is the survival-tail exponent in (1, 2]: step magnitudes s
    obey P(|step| > s) ~ s**-tail_exponent for large s (density exponent
    1 + tail_exponent).  min_step is the smallest magnitude the sampler emits,
    in the same units as the search coordinates after scaling.  scale
    multiplies raw draws before the cutoff is applied.
    """

    tail_exponent: float = 1.5
    min_step: float = 0.01
    scale: float = 1.0

    def __post_init__(self):
        if not 1.0 < self.tail_exponent <= 2.0:
            raise ValueError(
                f"tail_exponent must lie in (1, 2], got {self.tail_exponent!r}"
            )
        check_positive(self.min_step, "min_step")
        check_positive(self.scale, "scale")


def mantegna_sigma(tail_exponent: float) -> float:
    """Normal-ratio scale for the stable-law approximation.

    The sampler draws u ~ N(0, sigma**2) and v ~ N(0, 1) and emits
    u / |v|**(1/lambda), where sigma satisfies

        sigma**lambda = gamma(1 + lambda) * sin(pi * lambda / 2)
                        / (gamma((1 + lambda) / 2) * lambda * 2**((lambda - 1) / 2))

    which tunes the ratio so its tail follows the target power law.
    """
    lam = tail_exponent
    num = _gamma_fn(1.0 + lam) * np.sin(np.pi * lam / 2.0)
    den = _gamma_fn((1.0 + lam) / 2.0) * lam * 2.0 ** ((lam - 1.0) / 2.0)
    return float((num / den) ** (1.0 / lam))


class RandomSource:
    """Seedable random stream with fixed draw accounting.

    The backing generator is PCG64, whose output for a given seed is stable
    across platforms and numpy releases.  ``draws`` counts consumed draws.
    """

    def __init__(self, seed: int):
        self.seed = check_seed(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self.draws = 0

    def uniform(self) -> float:
        """One double in [0, 1)."""
        self.draws += 1
        return float(self._gen.random())

    def uniform_vec(self, m: int) -> np.ndarray:
        self.draws += m
        return self._gen.random(m)

    def uniform_matrix(self, rows: int, cols: int) -> np.ndarray:
        self.draws += rows * cols
        return self._gen.random((rows, cols))

    def integers_vec(self, m: int, high: int) -> np.ndarray:
        """m integers uniform on [0, high)."""
        self.draws += m
        return self._gen.integers(0, high, size=m)

    def partner_pairs(self, m: int, population: int) -> tuple[np.ndarray, np.ndarray]:
        """m ordered pairs (j, k), j != k, uniform without replacement.

        Degenerate population of one yields (0, 0) pairs without drawing.
        """
        if population == 1:
            zeros = np.zeros(m, dtype=np.int64)
            return zeros, zeros
        j = self.integers_vec(m, population)
        k = self.integers_vec(m, population - 1)
        k = k + (k >= j)
        return j, k

    def _levy_magnitudes(self, params: LevyParams, shape: tuple[int, ...]) -> np.ndarray:
        lam = params.tail_exponent
        u = self._gen.standard_normal((MAGNITUDE_DRAWS, *shape))
        v = self._gen.standard_normal((MAGNITUDE_DRAWS, *shape))
        self.draws += 2 * MAGNITUDE_DRAWS * int(np.prod(shape))
        if lam == 2.0:
            # Stable index 2 is Gaussian; the ratio construction degenerates
            # there (sin(pi * lambda / 2) = 0), so use the limit directly.
            raw = u
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                raw = (mantegna_sigma(lam) * u) / np.abs(v) ** (1.0 / lam)
        mags = params.scale * np.abs(raw)
        ok = np.isfinite(mags) & (mags >= params.min_step)
        first = np.argmax(ok, axis=0)
        chosen = np.take_along_axis(mags, first[None, ...], axis=0)[0]
        return np.where(ok.any(axis=0), chosen, params.min_step)

    def levy_matrix(self, params: LevyParams, rows: int, cols: int) -> np.ndarray:
        """(rows, cols) independent signed Levy steps."""
        mags = self._levy_magnitudes(params, (rows, cols))
        signs = np.where(self._gen.random((rows, cols)) < 0.5, -1.0, 1.0)
        self.draws += rows * cols
        return signs * mags

    def levy_vector(self, params: LevyParams, d: int) -> np.ndarray:
        """d independent signed Levy steps, one per coordinate."""
        check_positive_int(d, "d")
        return self.levy_matrix(params, 1, d)[0]

    def levy_step(self, params: LevyParams) -> float:
        """One signed Levy step."""
        return float(self.levy_vector(params, 1)[0])


def fit_tail_slope(
    magnitudes: np.ndarray,
    lower_quantile: float = 0.99,
    decade: float = 10.0,
    n_grid: int = 24,
) -> float:
    """Least-squares slope of log survival vs log magnitude over the top decade.

    The fit window starts at the given upper quantile of the magnitudes and
    spans one decade upward; for a power-law tail with exponent lambda the
    slope estimates -lambda.
    """
    mags = np.sort(np.asarray(magnitudes, dtype=float))
    if mags.size < 1000:
        raise ValueError("need at least 1000 samples for a tail fit")
    s_lo = float(np.quantile(mags, lower_quantile))
    grid = np.geomspace(s_lo, decade * s_lo, n_grid)
    survival = 1.0 - np.searchsorted(mags, grid, side="right") / mags.size
    keep = survival > 0
    if keep.sum() < 4:
        raise ValueError("tail window too sparse for a fit")
    slope = np.polyfit(np.log(grid[keep]), np.log(survival[keep]), 1)[0]
    return float(slope)


def survival_curve(
    magnitudes: np.ndarray, n_points: int = 64
) -> tuple[np.ndarray, np.ndarray]:
    """Log-spaced empirical survival curve, for histogram output."""
    mags = np.sort(np.asarray(magnitudes, dtype=float))
    positive = mags[mags > 0]
    grid = np.geomspace(positive[0], positive[-1], n_points)
    survival = 1.0 - np.searchsorted(mags, grid, side="right") / mags.size
    return grid, survival
