"""Linear-growth-with-immigration birth-death process.

States jump up at rate lam * n + a and down at rate mu * n; subcritical
when rho = lam / mu < 1.  Return times to state 0 regenerate the process.
The module provides the stationary law, the exact cycle-maximum tail (a
ladder-probability sum), its asymptotic form with the product-limit
prefactor, the matching rate envelope, event-driven cycle and
hitting-time simulation, and the closed-form checkpoint statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .engine import CyclePath, MaxPath, replica_rng
from .envelope import RateEnvelope, l2, l3
from .errors import BudgetError, ConvergenceError, CycleOverflow, DomainError, ModelError
from .extremes import ks_distance


@dataclass(frozen=True)
class BDSpec:
    """Birth-death rates: up lam * n + a, down mu * n; needs lam / mu < 1."""

    lam: float
    mu: float
    a: float

    def __post_init__(self):
        if not (self.lam > 0.0 and self.mu > 0.0 and self.a > 0.0):
            raise ModelError("lam, mu, a must all be positive")
        if not self.rho < 1.0:
            raise ModelError(f"rho = {self.rho} must be < 1")

    @property
    def rho(self) -> float:
        return self.lam / self.mu

    def birth_rate(self, n: int) -> float:
        return self.lam * n + self.a

    def death_rate(self, n: int) -> float:
        return self.mu * n


# ---------------------------------------------------------------------------
# stationary law


@dataclass(frozen=True)
class StationaryLaw:
    theta: np.ndarray
    p0: float
    p: np.ndarray


def stationary(spec: BDSpec, k_max: int) -> StationaryLaw:
    """Stationary weights theta_k and probabilities p_k = theta_k * p0.

    p0 comes from the full series sum(theta_k), continued past k_max until
    a geometric tail bound certifies relative truncation error < 1e-18.
    """
    if k_max < 0:
        raise DomainError(f"k_max must be >= 0, got {k_max}")
    theta = np.empty(k_max + 1, dtype=np.float64)
    theta[0] = 1.0
    for k in range(1, k_max + 1):
        theta[k] = theta[k - 1] * spec.birth_rate(k - 1) / spec.death_rate(k)

    terms = [1.0]
    th = 1.0
    k = 1
    while True:
        th *= spec.birth_rate(k - 1) / spec.death_rate(k)
        terms.append(th)
        # ratios are monotone in k toward rho, so future ratios stay below r
        r = max(spec.rho, spec.birth_rate(k) / spec.death_rate(k + 1))
        if r < 1.0 and th * r / (1.0 - r) < 1e-18 * math.fsum(terms):
            break
        k += 1
        if k > 10**7:
            raise ConvergenceError("stationary series did not meet its tail bound")
    p0 = 1.0 / math.fsum(terms)
    return StationaryLaw(theta=theta, p0=p0, p=theta * p0)


def mean_cycle_duration(spec: BDSpec) -> float:
    """Mean return time to state 0: 1 / (a * p0)."""
    return 1.0 / (spec.a * stationary(spec, 0).p0)


# ---------------------------------------------------------------------------
# exact and asymptotic cycle-maximum tails


def _log_alpha(spec: BDSpec, n: int) -> np.ndarray:
    """log alpha_k for k = 0..n, alpha_k = prod_{i=1}^k (mu i) / (lam i + a)."""
    i = np.arange(1, n + 1, dtype=np.float64)
    steps = np.log(spec.mu * i) - np.log(spec.lam * i + spec.a)
    return np.concatenate([[0.0], np.cumsum(steps)])


def log_cycle_max_tail(spec: BDSpec, n: int) -> float:
    """log P(cycle max > n); safe for any n (log-domain sum)."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return -float(logsumexp(_log_alpha(spec, n)))


def log_cycle_max_tail_grid(spec: BDSpec, n_max: int) -> np.ndarray:
    """log P(cycle max > n) for all n = 0..n_max at once."""
    return -np.logaddexp.accumulate(_log_alpha(spec, n_max))


def cycle_max_tail(spec: BDSpec, n: int) -> float:
    """P(cycle max > n) = 1 / sum_{k=0}^{n} alpha_k.

    Direct compensated sum for small n; log-domain beyond n = 50, where
    the weights alpha_k ~ rho^{-k} would overflow the intermediate sum.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n <= 50:
        alphas = []
        al = 1.0
        for k in range(n + 1):
            if k > 0:
                al *= spec.death_rate(k) / spec.birth_rate(k)
            alphas.append(al)
        return 1.0 / math.fsum(alphas)
    return math.exp(log_cycle_max_tail(spec, n))


@dataclass(frozen=True)
class TailConstant:
    value: float
    error: float


@lru_cache(maxsize=256)
def tail_constant(spec: BDSpec, max_pow: int = 20, tol: float = 1e-6) -> TailConstant:
    """Limit of n^(a/lam) * prod_{i=1}^{n} (1 - 1 / (1 + i lam / a)).

    Evaluated along n = 2^j in log domain and accelerated by second-order
    extrapolation in 1/n (the sequence has an expansion in integer powers
    of 1/n).  Raises ConvergenceError when successive extrapolants differ
    by more than ``tol``.
    """
    c = spec.a / spec.lam
    i = np.arange(1, 2**max_pow + 1, dtype=np.float64)
    cum = np.cumsum(np.log1p(-1.0 / (1.0 + i / c)))
    js = np.arange(8, max_pow + 1)
    n = 2.0**js
    g = np.exp(c * np.log(n) + cum[(2**js - 1).astype(np.int64)])
    r1 = 2.0 * g[1:] - g[:-1]
    r2 = (4.0 * r1[1:] - r1[:-1]) / 3.0
    err = abs(float(r2[-1] - r2[-2]))
    if err > tol:
        raise ConvergenceError(f"extrapolants for the tail constant differ by {err}")
    return TailConstant(value=float(r2[-1]), error=err)


def log_beta_sum_route(spec: BDSpec, n: int) -> float:
    """log beta_n via the split-sum identity, for cross-checking the product.

    Evaluates log beta_n = -sum u_i + sum [log(1 - u_i) + u_i] with
    u_i = 1/(1 + i lam / a): the first sum carries the divergent part, the
    second converges absolutely.  A different accumulation path from the
    direct cumulative product used by tail_constant.
    """
    i = np.arange(1, n + 1, dtype=np.float64)
    u = 1.0 / (1.0 + i * spec.lam / spec.a)
    return float(-math.fsum(u.tolist()) + math.fsum((np.log1p(-u) + u).tolist()))


def cycle_max_tail_asymptotic(spec: BDSpec, n: int) -> float:
    """((1/rho - 1) / C) * rho^(n+1) * n^(a/lam); the large-n tail form."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return math.exp(log_cycle_max_tail_asymptotic(spec, n))


def log_cycle_max_tail_asymptotic(spec: BDSpec, n: int) -> float:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    const = tail_constant(spec)
    return (
        math.log((1.0 / spec.rho - 1.0) / const.value)
        + (n + 1) * math.log(spec.rho)
        + (spec.a / spec.lam) * math.log(n)
    )


# ---------------------------------------------------------------------------
# envelope


def bd_envelope(spec: BDSpec, r1_scan_max: int = 300) -> RateEnvelope:
    """Envelope R0(x) = -x log(rho) - (a/lam) log(x) with numeric inverse.

    r0(x) = -log(rho) - a/(lam x), strictly positive beyond
    x0 = -a / (lam log rho).  The remainder bound is the largest gap
    between -log P(cycle max > n) and R0(n) over n = 1..r1_scan_max.
    """
    c = spec.a / spec.lam
    log_rho = math.log(spec.rho)

    def r0_fn(x):
        return -x * log_rho - c * np.log(x)

    def r0_deriv(x):
        return -log_rho - c / x

    x0 = -c / log_rho
    n = np.arange(1, r1_scan_max + 1, dtype=np.float64)
    log_q = log_cycle_max_tail_grid(spec, r1_scan_max)[1:]
    r1 = float(np.max(np.abs(-log_q - r0_fn(n))))
    return RateEnvelope.with_numeric_inverse(r0_fn, r0_deriv, kappa=0.0, x0=x0, r1_bound=r1)


# ---------------------------------------------------------------------------
# simulation


class BDModel:
    """Cycle generator: return-to-zero cycles of the birth-death process."""

    def __init__(self, spec: BDSpec, max_events: int = 10**9):
        self.spec = spec
        self.max_events = max_events

    def sample_cycle(self, rng: np.random.Generator) -> CyclePath:
        return bd_cycle(self.spec, rng, max_events=self.max_events)


def bd_cycle(spec: BDSpec, rng: np.random.Generator, max_events: int = 10**9) -> CyclePath:
    """One return-to-zero cycle, event-driven, including the initial idle wait."""
    idle = rng.exponential(1.0 / spec.a)
    elapsed = idle
    k = 1
    kmax = 1
    rec_t = [0.0, idle]
    rec_v = [0.0, 1.0]
    events = 1
    while k > 0:
        up = spec.lam * k + spec.a
        down = spec.mu * k
        total = up + down
        elapsed += rng.exponential(1.0 / total)
        if rng.random() < up / total:
            k += 1
            if k > kmax:
                kmax = k
                rec_t.append(elapsed)
                rec_v.append(float(k))
        else:
            k -= 1
        events += 1
        if events > max_events:
            raise CycleOverflow(f"cycle exceeded {max_events} events")
    return CyclePath(
        duration=elapsed, cycle_max=float(kmax), record_times=tuple(rec_t), record_values=tuple(rec_v)
    )


# ---------------------------------------------------------------------------
# closed-form checkpoint statistics


def bd_direct_stats(path: MaxPath, spec: BDSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closed-form statistics (t, u2, u3) along a path.

    u2 = (xbar * log(1/rho) - log t) / log log t, whose upper band is
    1 + a/lam; u3 recenters by (a/lam) * log log t and rescales by
    log log log t, with lower band -1.
    """
    c = spec.a / spec.lam
    log_inv_rho = math.log(1.0 / spec.rho)
    ts = path.ts
    scale2 = np.array([l2(float(t)) for t in ts])
    scale3 = np.array([l3(float(t)) for t in ts])
    core = path.xbars * log_inv_rho - np.log(ts)
    u2 = core / scale2
    u3 = (core - c * scale2) / scale3
    return ts, u2, u3


# ---------------------------------------------------------------------------
# hitting times


@dataclass(frozen=True)
class HittingTimeResult:
    """Scaled first-passage sample with its exponential-limit comparison."""

    level: int
    raw: np.ndarray
    scaled: np.ndarray
    scale: float
    exp_rate: float
    ks: float

    @property
    def mean_scaled(self) -> float:
        return float(np.mean(self.scaled))


def hitting_scale(spec: BDSpec, n: int) -> float:
    """Scale factor (1/rho - 1) / C * rho^n * n^(a/lam) for first passage to n."""
    const = tail_constant(spec)
    return (1.0 / spec.rho - 1.0) / const.value * spec.rho**n * n ** (spec.a / spec.lam)


def hitting_time_sample(
    spec: BDSpec,
    n: int,
    replicas: int,
    master_seed: int,
    *,
    initial_state: int = 0,
    event_cap: int = 500_000_000,
) -> HittingTimeResult:
    """First-passage times to state n, scaled toward their exponential limit.

    Each replica runs on its own generator stream derived from
    (master_seed, replica).  Raises BudgetError if the projected total
    event count exceeds ``event_cap``; expected cost grows like rho^{-n}.
    """
    if n < 1:
        raise DomainError(f"target state must be >= 1, got {n}")
    if replicas < 1:
        raise DomainError("need at least one replica")
    if not 0 <= initial_state < n:
        raise DomainError(f"initial state must lie in [0, {n})")
    law = stationary(spec, 0)
    exp_rate = spec.a * law.p0
    scale = hitting_scale(spec, n)
    mean_state = spec.a / (spec.mu - spec.lam)
    event_rate = spec.a + (spec.lam + spec.mu) * mean_state
    projected = 2.0 * replicas * event_rate / (exp_rate * scale)
    if projected > event_cap:
        raise BudgetError(
            f"projected ~{projected:.3g} events exceeds cap {event_cap:.3g}; "
            f"lower n or replicas, or raise event_cap"
        )
    per_replica_cap = max(int(event_cap // replicas), 1_000_000)
    raw = np.empty(replicas, dtype=np.float64)
    for i in range(replicas):
        rng = replica_rng(master_seed, i)
        t, ok = _kernels.bd_hitting_time(
            spec.lam, spec.mu, spec.a, n, initial_state, per_replica_cap, rng
        )
        if not ok:
            raise CycleOverflow(f"replica {i} exceeded {per_replica_cap} events")
        raw[i] = t
    scaled = scale * raw
    ks = ks_distance(scaled, lambda x: -np.expm1(-exp_rate * np.asarray(x)))
    return HittingTimeResult(level=n, raw=raw, scaled=scaled, scale=scale, exp_rate=exp_rate, ks=ks)
