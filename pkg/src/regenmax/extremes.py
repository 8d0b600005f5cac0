"""I.i.d. running maxima: inverse-rate sampling, checkpointed maxima,
normalized statistics, and distributional cross-checks.

A variable with log-tail rate R (P(X > x) = exp(-R(x))) can be sampled as
R^{-1}(u) with u standard exponential; running maxima of such samples,
centered at a(n) = R0^{-1}(log n) and scaled by the iterated logarithms,
stay within unit bands.  The Gumbel check validates the exponential layer
that everything else is built on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .envelope import EE, RateEnvelope, l2, l3
from .errors import DomainError

#: smallest index with log log log n > 0
N_MIN_TRIPLE = 16  # = ceil(e^e)


def sample_via_inverse(r_inv, u: float) -> float:
    """Map a standard-exponential variate through an inverse rate.

    ``r_inv`` is either a callable y -> R^{-1}(y) or a RateEnvelope (its
    r0_inv is used).  With u ~ Exp(1) the output has tail exp(-R(x)).
    """
    if u < 0.0:
        raise DomainError(f"exponential variate must be nonnegative, got {u}")
    inv = r_inv.r0_inv if isinstance(r_inv, RateEnvelope) else r_inv
    return inv(u)


@dataclass(frozen=True)
class MaxSeries:
    """Running maxima z_n recorded on a sparse, strictly increasing index grid."""

    ns: np.ndarray
    zs: np.ndarray

    def __post_init__(self):
        ns, zs = np.asarray(self.ns), np.asarray(self.zs)
        if ns.shape != zs.shape or ns.ndim != 1:
            raise ValueError("ns and zs must be 1-d arrays of equal length")
        if len(ns) and not np.all(np.diff(ns) > 0):
            raise ValueError("index grid must be strictly increasing")
        if len(zs) and not np.all(np.diff(zs) >= 0):
            raise ValueError("running maxima must be nondecreasing")


def checkpoint_grid(n_max: int, grid_ratio: float) -> np.ndarray:
    """Geometric index grid ceil(g^j) deduplicated, ending at n_max."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if not grid_ratio > 1.0:
        raise ValueError(f"grid ratio must exceed 1, got {grid_ratio}")
    out = []
    j = 0
    while True:
        n = math.ceil(grid_ratio**j)
        if n >= n_max:
            break
        out.append(n)
        j += 1
    out.append(n_max)
    return np.unique(np.asarray(out, dtype=np.int64))


def running_max_series(
    sampler: Callable[[np.random.Generator, int], np.ndarray],
    n_max: int,
    grid_ratio: float = 1.1,
    *,
    rng: np.random.Generator,
    block: int = 1 << 16,
) -> MaxSeries:
    """Single pass over n_max draws, recording z_n on a geometric grid.

    ``sampler(rng, size)`` must return a 1-d array of draws.  Memory is
    O(log n_max) for the checkpoints plus one block buffer.
    """
    ns = checkpoint_grid(n_max, grid_ratio)
    zs = np.empty(len(ns), dtype=np.float64)
    carry = -np.inf
    done = 0  # draws consumed so far
    j = 0
    while done < n_max:
        size = min(block, n_max - done)
        running = np.maximum.accumulate(sampler(rng, size))
        running = np.maximum(running, carry)
        while j < len(ns) and ns[j] <= done + size:
            zs[j] = running[ns[j] - done - 1]
            j += 1
        carry = running[-1]
        done += size
    return MaxSeries(ns=ns, zs=zs)


class IndexedStats(NamedTuple):
    n: int
    s2: float
    s3: float


def max_stat(env: RateEnvelope, n: int, z: float) -> IndexedStats:
    """Normalized deviation of one running maximum from a(n) = R0^{-1}(log n)."""
    if n < N_MIN_TRIPLE:
        raise DomainError(f"need n > e^e ~ {EE:.3f} for the triple-log scale, got {n}")
    a = env.r0_inv(math.log(n))
    dev = env.r0_deriv(a) * (z - a)
    return IndexedStats(n=int(n), s2=dev / l2(n), s3=dev / l3(n))


def iid_max_stats(env: RateEnvelope, series: MaxSeries) -> list[IndexedStats]:
    """Per-checkpoint normalized statistics; checkpoints with n <= e^e are skipped."""
    out = [max_stat(env, int(n), float(z)) for n, z in zip(series.ns, series.zs) if n >= N_MIN_TRIPLE]
    if not out:
        raise DomainError("no checkpoint beyond e^e in the series")
    return out


def lattice_max_stats(env: RateEnvelope, series: MaxSeries) -> list[IndexedStats]:
    """iid_max_stats for integer-valued samples.

    The formula is identical; the +-1 rounding slack of the discrete
    inverse is absorbed because r0 stays bounded for the envelopes that
    pass the slow-growth conditions.
    """
    zs = np.asarray(series.zs)
    if not (np.all(zs >= 0) and np.all(zs == np.floor(zs))):
        raise DomainError("lattice statistics require nonnegative integer samples")
    return iid_max_stats(env, series)


def ks_distance(sample: Sequence[float], cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """One-sample Kolmogorov-Smirnov distance sup_x |F_m(x) - F(x)|.

    Evaluated at the sorted sample points from both sides of each jump.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64))
    m = len(x)
    if m == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(x), dtype=np.float64)
    upper = np.arange(1, m + 1) / m - f
    lower = f - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))


def gumbel_cdf(x: np.ndarray) -> np.ndarray:
    return np.exp(-np.exp(-np.asarray(x, dtype=np.float64)))


def gumbel_check(
    n: int,
    replicas: int,
    *,
    rng: np.random.Generator,
    row_block: int = 256,
) -> float:
    """KS distance between the law of (max of n Exp(1) draws) - log n and Gumbel.

    The limit needs n large: recommended n >= 1e3 and replicas >= 100,
    though smaller values are accepted so the degradation is observable.
    """
    if n < 1 or replicas < 1:
        raise ValueError("n and replicas must be positive")
    tops = np.empty(replicas, dtype=np.float64)
    done = 0
    while done < replicas:
        rows = min(row_block, replicas - done)
        tops[done : done + rows] = rng.exponential(size=(rows, n)).max(axis=1)
        done += rows
    return ks_distance(tops - math.log(n), gumbel_cdf)
