"""Regenerative-process engine: streams i.i.d. cycles, maintains the cycle
count N(t) and the exact running maximum along a geometric time grid, and
evaluates the normalized statistics per checkpoint.

Models hand the engine one cycle at a time.  A cycle that carries its
within-cycle new-maximum records (CyclePath) yields an exact running
maximum at every checkpoint; a bare CycleSample yields the conservative
bracket [Z_N(t), Z_N(t)+1] and the path is flagged as inexact.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from .envelope import RateEnvelope, NormalizedStats, normalized_stats
from .errors import DomainError


def replica_rng(master_seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for replica ``index`` of a campaign.

    Streams are derived deterministically from (master_seed, index) via a
    Philox bit generator, so replicas are independent and reproducible
    regardless of scheduling.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(index,))))


@dataclass(frozen=True)
class CycleSample:
    """One regeneration cycle: its duration and its maximum."""

    duration: float
    cycle_max: float

    def __post_init__(self):
        if not self.duration > 0.0:
            raise ValueError(f"cycle duration must be positive, got {self.duration}")


@dataclass(frozen=True)
class CyclePath(CycleSample):
    """Cycle with new-maximum records: (elapsed offset, running max) pairs.

    record_times are nondecreasing offsets from the cycle start;
    record_values are strictly increasing and end at cycle_max.
    """

    record_times: tuple[float, ...] = field(default=())
    record_values: tuple[float, ...] = field(default=())

    def partial_max(self, tau: float) -> float | None:
        """Running max over the half-open window [0, tau); None if empty."""
        idx = bisect_left(self.record_times, tau)
        return self.record_values[idx - 1] if idx else None


class CycleModel(Protocol):
    def sample_cycle(self, rng: np.random.Generator) -> CycleSample: ...


@dataclass(frozen=True)
class MaxPath:
    """Checkpointed running-maximum trajectory on a geometric time grid.

    xbar is exact when ``exact`` is True; otherwise it is the completed-
    cycle lower bound and xbar_upper holds the next-cycle upper bound.
    """

    ts: np.ndarray
    xbars: np.ndarray
    xbar_uppers: np.ndarray
    n_cycles: np.ndarray
    exact: bool

    def __post_init__(self):
        if not (len(self.ts) == len(self.xbars) == len(self.xbar_uppers) == len(self.n_cycles)):
            raise ValueError("checkpoint arrays must have equal length")
        if len(self.ts) and not np.all(np.diff(self.ts) > 0):
            raise ValueError("time grid must be strictly increasing")
        finite = np.isfinite(self.xbars)
        if np.any(np.diff(self.xbars[finite]) < 0):
            raise ValueError("running maximum must be nondecreasing")
        if np.any(np.diff(self.n_cycles) < 0):
            raise ValueError("cycle counts must be nondecreasing")


@dataclass(frozen=True)
class RunSummary:
    """Totals over the cycles completed by the horizon t_max."""

    total_cycles: int
    total_time: float
    alpha_hat: float
    mean_cycle_max: float


def time_grid(t_min: float, grid_ratio: float, t_max: float) -> np.ndarray:
    """Geometric checkpoint times t_min * g^j, capped at t_max."""
    if not (0.0 < t_min <= t_max):
        raise ValueError(f"need 0 < t_min <= t_max, got {t_min}, {t_max}")
    if not grid_ratio > 1.0:
        raise ValueError(f"grid ratio must exceed 1, got {grid_ratio}")
    count = int(math.floor(math.log(t_max / t_min) / math.log(grid_ratio))) + 1
    ts = t_min * grid_ratio ** np.arange(count, dtype=np.float64)
    return ts[ts <= t_max]


def run_cycles(
    model: CycleModel,
    t_max: float,
    *,
    t_min: float = 100.0,
    grid_ratio: float = 1.05,
    rng: np.random.Generator,
    check_invariants: bool = False,
) -> tuple[MaxPath, RunSummary]:
    """Stream cycles until the partial sums pass t_max.

    Records (t, xbar, N(t)) at every grid time.  All randomness comes from
    ``rng``; identical (model, grid, generator state) gives a bit-identical
    path.
    """
    ts = time_grid(t_min, grid_ratio, t_max)
    xbars = np.empty(len(ts), dtype=np.float64)
    uppers = np.empty(len(ts), dtype=np.float64)
    counts = np.empty(len(ts), dtype=np.int64)

    s_prev = 0.0  # regeneration epoch opening the current cycle
    z_done = -math.inf  # max over completed cycles
    k_all = 0  # completed cycles (any horizon)
    n_done = 0  # completed cycles within t_max
    sum_time = 0.0
    sum_max = 0.0
    exact = True
    j = 0

    while j < len(ts) or s_prev <= t_max:
        cycle = model.sample_cycle(rng)
        has_path = isinstance(cycle, CyclePath)
        exact = exact and has_path
        while j < len(ts):
            tau = ts[j] - s_prev
            if tau >= cycle.duration:
                break
            if has_path:
                part = cycle.partial_max(tau)
                xb = z_done if part is None else max(z_done, part)
                ub = xb
            else:
                xb = z_done
                ub = max(z_done, cycle.cycle_max)
            if check_invariants:
                assert z_done <= xb <= ub <= max(z_done, cycle.cycle_max)
            xbars[j] = xb
            uppers[j] = ub
            counts[j] = k_all
            j += 1
        z_done = max(z_done, cycle.cycle_max)
        s_prev = s_prev + cycle.duration
        k_all += 1
        if s_prev <= t_max:
            n_done += 1
            sum_time = s_prev
            sum_max += cycle.cycle_max

    summary = RunSummary(
        total_cycles=n_done,
        total_time=sum_time,
        alpha_hat=sum_time / n_done if n_done else math.nan,
        mean_cycle_max=sum_max / n_done if n_done else math.nan,
    )
    return MaxPath(ts=ts, xbars=xbars, xbar_uppers=uppers, n_cycles=counts, exact=exact), summary


def normalized_trace(path: MaxPath, env: RateEnvelope, alpha_t: float) -> list[NormalizedStats]:
    """Normalized statistics at every checkpoint of a path.

    Uses path.xbars, which is the exact running maximum for exact paths
    and the completed-cycle lower bound otherwise.
    """
    return [
        normalized_stats(env, alpha_t, float(t), float(xb))
        for t, xb in zip(path.ts, path.xbars)
    ]


def event_indexed_stats(
    event_values: Sequence[float],
    env: RateEnvelope,
    alpha: float | None,
    alpha_t: float,
    *,
    event_times: Sequence[float] | None = None,
    n_start: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Normalized statistics indexed by event count rather than wall clock.

    For events at times t_i with t_n/n -> alpha, the centering becomes
    A(n) = R0^{-1}(log(alpha * n / alpha_t)).  When ``alpha`` is None it is
    estimated as t_N / N from ``event_times``.  Returns (n, s2, s3) arrays
    for n from n_start (default: the first index where both iterated-log
    scales and the inverse are defined) through N.
    """
    values = np.asarray(event_values, dtype=np.float64)
    n_total = len(values)
    if alpha is None:
        if event_times is None:
            raise ValueError("need event_times to estimate alpha")
        alpha = float(event_times[-1]) / n_total
    if alpha <= 0.0:
        raise DomainError(f"events-per-time scale alpha must be positive, got {alpha}")

    y_min = env.r0_fn(env.x0)
    lo = 16  # first n with log log log n > 0
    # first n with log(alpha n / alpha_t) inside the inverse's domain
    lo = max(lo, int(math.floor(math.exp(y_min) * alpha_t / alpha)) + 1)
    if n_start is not None:
        if n_start < lo:
            raise DomainError(f"n_start {n_start} below first valid index {lo}")
        lo = n_start
    if lo > n_total:
        raise DomainError(f"no valid index: first valid {lo} exceeds N = {n_total}")

    xbar = np.maximum.accumulate(values)[lo - 1 :]
    n = np.arange(lo, n_total + 1, dtype=np.float64)
    y = np.log(alpha * n / alpha_t)
    a = _apply(env.r0_inv, y)
    dev = _apply(env.r0_deriv, a) * (xbar - a)
    log_n = np.log(n)
    return n.astype(np.int64), dev / np.log(log_n), dev / np.log(np.log(log_n))


def _apply(fn: Callable[[float], float], arr: np.ndarray) -> np.ndarray:
    """Vectorized call with a scalar fallback for non-ufunc callables."""
    try:
        out = np.asarray(fn(arr), dtype=np.float64)
        if out.shape == arr.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.asarray([fn(float(v)) for v in arr], dtype=np.float64)
