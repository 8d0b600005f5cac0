"""Single-server waiting-time cycles and multi-server queue-length cycles.

The waiting-time process of a GI/G/1 queue regenerates at arrivals that
find the system empty; cycles are generated by the Lindley recursion
W_k = max(0, W_{k-1} + service - interarrival).  Cycle maxima have an
exponential log-tail with rate equal to the Cramer exponent, the positive
root of E exp(gamma * (service - interarrival)) = 1.

The queue length of an M/M/m system regenerates at arrivals ending an
idle period; its cycle maxima have log-tail rate -log(rho) per unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .engine import CyclePath
from .envelope import RateEnvelope
from .errors import CycleOverflow, DomainError, ModelError, NoRootError

# ---------------------------------------------------------------------------
# distributions with closed-form transforms


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not self.rate > 0.0:
            raise ModelError(f"rate must be positive, got {self.rate}")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def mgf_domain_sup(self) -> float:
        return self.rate

    def sample(self, rng: np.random.Generator, size=None):
        return rng.exponential(1.0 / self.rate, size)

    def mgf(self, s: float) -> float:
        return self.rate / (self.rate - s) if s < self.rate else math.inf

    def pdf(self, x: float) -> float:
        return self.rate * math.exp(-self.rate * x) if x >= 0.0 else 0.0

    support = (0.0, math.inf)


@dataclass(frozen=True)
class Deterministic:
    value: float

    def __post_init__(self):
        if not self.value > 0.0:
            raise ModelError(f"value must be positive, got {self.value}")

    @property
    def mean(self) -> float:
        return self.value

    mgf_domain_sup = math.inf

    def sample(self, rng: np.random.Generator, size=None):
        return self.value if size is None else np.full(size, self.value)

    def mgf(self, s: float) -> float:
        return math.exp(s * self.value)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi:
            raise ModelError(f"need 0 <= lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    mgf_domain_sup = math.inf

    def sample(self, rng: np.random.Generator, size=None):
        return rng.random(size) * (self.hi - self.lo) + self.lo

    def mgf(self, s: float) -> float:
        if s == 0.0:
            return 1.0
        width = self.hi - self.lo
        return (math.exp(s * self.hi) - math.exp(s * self.lo)) / (s * width)

    def pdf(self, x: float) -> float:
        return 1.0 / (self.hi - self.lo) if self.lo <= x <= self.hi else 0.0

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class Gamma:
    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0.0 and self.rate > 0.0):
            raise ModelError("shape and rate must be positive")

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def mgf_domain_sup(self) -> float:
        return self.rate

    def sample(self, rng: np.random.Generator, size=None):
        return rng.gamma(self.shape, 1.0 / self.rate, size)

    def mgf(self, s: float) -> float:
        return (self.rate / (self.rate - s)) ** self.shape if s < self.rate else math.inf

    def pdf(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        return math.exp(
            self.shape * math.log(self.rate)
            + (self.shape - 1.0) * math.log(x)
            - self.rate * x
            - math.lgamma(self.shape)
        )

    support = (0.0, math.inf)


def mgf_by_quadrature(dist, s: float, tol: float = 1e-12) -> float:
    """E exp(s X) by adaptive quadrature of exp(s x) * pdf(x).

    Independent route for distributions whose transform is known in closed
    form, and the only route for those that are not.  The integrand is
    assembled in log space so large tilts do not overflow before the
    density cancels them.
    """

    def integrand(x: float) -> float:
        p = dist.pdf(x)
        if p <= 0.0:
            return 0.0
        arg = s * x + math.log(p)
        return math.exp(arg) if arg < 700.0 else math.inf

    a, b = dist.support
    val, _ = quad(integrand, a, b, epsabs=tol, epsrel=tol, limit=400)
    return val


def _mgf(dist, s: float) -> float:
    if hasattr(dist, "mgf"):
        return dist.mgf(s)
    return mgf_by_quadrature(dist, s)


# ---------------------------------------------------------------------------
# model specs


@dataclass(frozen=True)
class GiG1Spec:
    """Single-server queue: interarrival and service time distributions.

    Requires subcritical traffic: mean service / mean interarrival < 1.
    """

    interarrival: object
    service: object

    def __post_init__(self):
        rho = self.service.mean / self.interarrival.mean
        if not rho < 1.0:
            raise ModelError(f"traffic intensity rho = {rho} must be < 1")

    @classmethod
    def unchecked(cls, interarrival, service) -> "GiG1Spec":
        """Bypass the stability check (diagnostics of critical systems only)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "interarrival", interarrival)
        object.__setattr__(obj, "service", service)
        return obj

    @classmethod
    def mm1(cls, lam: float, mu: float) -> "GiG1Spec":
        return cls(Exponential(lam), Exponential(mu))

    @classmethod
    def md1(cls, lam: float, d: float) -> "GiG1Spec":
        return cls(Exponential(lam), Deterministic(d))

    @property
    def rho(self) -> float:
        return self.service.mean / self.interarrival.mean

    def alpha_t_closed_form(self) -> float | None:
        """Mean cycle duration when available: a / (1 - rho) for Poisson arrivals."""
        if isinstance(self.interarrival, Exponential):
            return self.interarrival.mean / (1.0 - self.rho)
        return None


@dataclass(frozen=True)
class MMmSpec:
    """M/M/m queue: Poisson arrivals at rate lam, m exponential servers at rate mu."""

    lam: float
    mu: float
    m: int

    def __post_init__(self):
        if not (self.lam > 0.0 and self.mu > 0.0):
            raise ModelError("rates must be positive")
        if not (isinstance(self.m, int) and self.m >= 1):
            raise ModelError(f"server count must be an integer >= 1, got {self.m}")
        if not self.rho < 1.0:
            raise ModelError(f"traffic intensity rho = {self.rho} must be < 1")

    @property
    def rho(self) -> float:
        return self.lam / (self.m * self.mu)


# ---------------------------------------------------------------------------
# cycle generation


@dataclass(frozen=True)
class LindleyCycle(CyclePath):
    """Waiting-time cycle with per-customer waits (opener first)."""

    n_customers: int = 0
    waits: tuple[float, ...] = ()


class GiG1WaitModel:
    """Cycle generator for the waiting-time process of a GI/G/1 queue."""

    def __init__(self, spec: GiG1Spec, max_customers: int = 10**9):
        self.spec = spec
        self.max_customers = max_customers

    def sample_cycle(self, rng: np.random.Generator) -> LindleyCycle:
        return lindley_cycle(self.spec, rng, max_customers=self.max_customers)


def lindley_cycle(spec: GiG1Spec, rng: np.random.Generator, max_customers: int = 10**9) -> LindleyCycle:
    """One waiting-time regeneration cycle.

    The opener arrives at offset 0 with zero wait; the cycle closes at the
    first later arrival whose wait is exactly zero (it opens the next
    cycle).  Duration is the sum of the interarrival gaps, i.e. the offset
    of the closing arrival.
    """
    interarrival, service = spec.interarrival, spec.service
    w = 0.0
    offset = 0.0
    wmax = 0.0
    rec_t = [0.0]
    rec_v = [0.0]
    waits = [0.0]
    count = 1
    while True:
        eta = service.sample(rng)
        zeta = interarrival.sample(rng)
        offset += zeta
        w = max(0.0, w + eta - zeta)
        if w == 0.0:
            return LindleyCycle(
                duration=offset,
                cycle_max=wmax,
                record_times=tuple(rec_t),
                record_values=tuple(rec_v),
                n_customers=count,
                waits=tuple(waits),
            )
        count += 1
        if count > max_customers:
            raise CycleOverflow(f"cycle exceeded {max_customers} customers (near-critical rho?)")
        waits.append(w)
        if w > wmax:
            wmax = w
            rec_t.append(offset)
            rec_v.append(w)


def lindley_waits(
    spec: GiG1Spec, n_customers: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized waiting-time sequence (arrival times, waits) for n customers.

    Uses W_k = S_k - min_{j<=k} S_j with S the partial sums of
    (service - interarrival); customer 0 arrives at time 0 with zero wait.
    """
    etas = np.asarray(spec.service.sample(rng, n_customers - 1), dtype=np.float64)
    zetas = np.asarray(spec.interarrival.sample(rng, n_customers - 1), dtype=np.float64)
    s = np.concatenate([[0.0], np.cumsum(etas - zetas)])
    waits = s - np.minimum.accumulate(s)
    arrivals = np.concatenate([[0.0], np.cumsum(zetas)])
    return arrivals, waits


class MMmQueueModel:
    """Cycle generator for the queue-length process of an M/M/m queue."""

    def __init__(self, spec: MMmSpec, max_events: int = 10**9):
        self.spec = spec
        self.max_events = max_events

    def sample_cycle(self, rng: np.random.Generator) -> CyclePath:
        return mmm_cycle(self.spec, rng, max_events=self.max_events)


def mmm_cycle(spec: MMmSpec, rng: np.random.Generator, max_events: int = 10**9) -> CyclePath:
    """One queue-length regeneration cycle of an M/M/m system.

    Starts at state 1 (the arrival opening a busy period), runs the CTMC
    with birth rate lam and death rate min(k, m) * mu until state 0, then
    appends the exponential idle gap to the duration.
    """
    k = 1
    elapsed = 0.0
    kmax = 1
    rec_t = [0.0]
    rec_v = [1.0]
    events = 0
    while k > 0:
        rate = spec.lam + spec.mu * min(k, spec.m)
        elapsed += rng.exponential(1.0 / rate)
        if rng.random() < spec.lam / rate:
            k += 1
            if k > kmax:
                kmax = k
                rec_t.append(elapsed)
                rec_v.append(float(k))
        else:
            k -= 1
        events += 1
        if events > max_events:
            raise CycleOverflow(f"cycle exceeded {max_events} events (near-critical rho?)")
    duration = elapsed + rng.exponential(1.0 / spec.lam)
    return CyclePath(
        duration=duration, cycle_max=float(kmax), record_times=tuple(rec_t), record_values=tuple(rec_v)
    )


# ---------------------------------------------------------------------------
# exponents and envelopes


def cramer_gamma(spec: GiG1Spec, rel_tol: float = 1e-10) -> float:
    """Positive root of E exp(gamma * (service - interarrival)) = 1.

    Brackets by doubling from 1e-9 until the tilted expectation exceeds 1
    or the transform's domain boundary is reached, then bisects.  Also
    checks that the tilted mean at the root is finite.
    """

    def phi(g: float) -> float:
        return _mgf(spec.service, g) * _mgf(spec.interarrival, -g)

    dom = getattr(spec.service, "mgf_domain_sup", math.inf)
    lo = 1e-9
    if not phi(lo) < 1.0:
        raise NoRootError(
            "tilted expectation does not dip below 1 near 0; no strictly positive root "
            "(traffic intensity at or above 1?)"
        )
    hi = lo
    while True:
        nxt = 2.0 * hi if 2.0 * hi < dom else 0.5 * (hi + dom)
        if nxt <= hi * (1.0 + 1e-12):
            raise NoRootError("tilted expectation stays below 1 on the searchable range")
        hi = nxt
        val = phi(hi)
        if val > 1.0:
            break
        if math.isfinite(val):
            lo = hi
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if phi(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)

    h = min(root * 1e-7, (dom - root) * 0.5) if math.isfinite(dom) else root * 1e-7
    tilted_mean = (phi(root + h) - phi(root - h)) / (2.0 * h)
    if not math.isfinite(tilted_mean):
        raise NoRootError("tilted mean diverges at the root; exponent not admissible")
    return root


def md1_decay_root(rho: float, abs_tol: float = 1e-12) -> float:
    """Unique positive root of e^x = 1 + x/rho (M/D/1 cycle-max decay scale).

    The cycle-max exponent of an M/D/1 queue with load rho and service d
    is this root divided by d.
    """
    if not 0.0 < rho < 1.0:
        raise DomainError(f"need rho in (0, 1), got {rho}")

    def f(x: float) -> float:
        return math.expm1(x) - x / rho

    lo, hi = 1e-13, 2.0 / rho
    if not (f(lo) < 0.0 < f(hi)):
        raise DomainError(f"root bracket failed for rho = {rho}")
    while hi - lo > abs_tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gig1_envelope(spec: GiG1Spec) -> RateEnvelope:
    """Linear envelope R0(x) = gamma * x for GI/G/1 waiting-time maxima."""
    gamma = cramer_gamma(spec)
    return RateEnvelope(
        r0_fn=lambda x: gamma * x,
        r0_deriv=lambda x: gamma + 0.0 * x,
        r0_inv=lambda y: y / gamma,
        kappa=0.0,
        x0=0.0,
        r1_bound=None,
    )


def mmm_envelope(spec: MMmSpec) -> RateEnvelope:
    """Linear envelope R0(x) = -x log(rho) for M/M/m queue-length maxima.

    The remainder bound is measured from the exact ladder tail over
    n <= 300.
    """
    c = -math.log(spec.rho)
    log_q = mmm_log_tail_grid(spec, 300)
    n = np.arange(0, 301, dtype=np.float64)
    r1 = float(np.max(np.abs(-log_q - c * n)))
    return RateEnvelope(
        r0_fn=lambda x: c * x,
        r0_deriv=lambda x: c + 0.0 * x,
        r0_inv=lambda y: y / c,
        kappa=0.0,
        x0=0.0,
        r1_bound=r1,
    )


# ---------------------------------------------------------------------------
# exact M/M/m cycle-max tail (ladder probabilities) and stationary idle mass


def mmm_log_tail_grid(spec: MMmSpec, n_max: int) -> np.ndarray:
    """log P(cycle max > n) for n = 0..n_max, from the ladder formula.

    P(cycle max > n) = 1 / sum_{k=0}^{n} alpha_k with
    alpha_k = prod_{i=1}^{k} min(i, m) mu / lam; computed in log domain.
    """
    i = np.arange(1, n_max + 1, dtype=np.float64)
    steps = np.log(np.minimum(i, float(spec.m)) * spec.mu) - math.log(spec.lam)
    log_alpha = np.concatenate([[0.0], np.cumsum(steps)])
    return -np.logaddexp.accumulate(log_alpha)


def mmm_tail_exact(spec: MMmSpec, n: int) -> float:
    """P(cycle max > n) for the M/M/m queue length."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return float(np.exp(mmm_log_tail_grid(spec, n)[n]))


@lru_cache(maxsize=256)
def mmm_p0(spec: MMmSpec) -> float:
    """Stationary probability of an empty M/M/m system (Erlang delay form)."""
    r = spec.lam / spec.mu
    head = math.fsum(r**k / math.factorial(k) for k in range(spec.m))
    tail = r**spec.m / (math.factorial(spec.m) * (1.0 - spec.rho))
    return 1.0 / (head + tail)


def mmm_alpha_t(spec: MMmSpec) -> float:
    """Mean regeneration-cycle duration 1 / (lam * p0) for the M/M/m queue."""
    return 1.0 / (spec.lam * mmm_p0(spec))
