"""Deterministic normalization machinery for running-maximum asymptotics.

The central object is a rate envelope: a smooth log-tail rate R0 that is
strictly increasing beyond a threshold x0, together with its derivative r0
and its inverse.  The envelope turns a wall-clock horizon t into a
centering term A0(t) = R0^{-1}(log(t / mean_cycle)), and deviations of the
running maximum from that centering are scaled by log log t (upper
excursions) and log log log t (lower excursions).

Everything here is a pure function of its inputs; nothing holds state.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import BracketError, DomainError

#: thresholds below which the iterated logarithms are nonpositive
E = math.e
EE = math.exp(math.e)  # log log t > 0 needs t > e; log log log t > 0 needs t > e^e


def generalized_inverse(
    h: Callable[[float], float],
    y: float,
    bracket: tuple[float, float],
    rel_tol: float = 1e-10,
) -> float:
    """Leftmost crossing point inf{x in bracket : h(x) > y} by bisection.

    ``h`` must be nondecreasing on the bracket.  For strictly increasing
    continuous ``h`` this coincides with the ordinary inverse.  The result
    is accurate to ``rel_tol`` times the bracket width (absolute).

    Raises BracketError when ``h`` never exceeds ``y`` on the bracket.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise BracketError(f"empty bracket [{lo}, {hi}]")
    if not h(hi) > y:
        raise BracketError(f"h({hi}) = {h(hi)} never exceeds y = {y} on the bracket")
    if h(lo) > y:
        # crossing is at or below the left edge; lo is the infimum we can see
        return lo
    tol = rel_tol * (hi - lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if h(mid) > y:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class RateEnvelope:
    """Log-tail rate bundle: smooth component R0, derivative, inverse.

    Fields
    ------
    r0_fn:    the smooth rate component R0 (dimensionless log-tail scale)
    r0_deriv: r0 = R0'
    r0_inv:   inverse of R0, valid for arguments >= R0(x0)
    kappa:    regular-variation index of (R0^{-1})'
    x0:       threshold above which R0 is strictly increasing/differentiable
    r1_bound: bound on the bounded remainder |R - R0|; None when unknown
    """

    r0_fn: Callable[[float], float]
    r0_deriv: Callable[[float], float]
    r0_inv: Callable[[float], float]
    kappa: float
    x0: float
    r1_bound: float | None = None

    @classmethod
    def with_numeric_inverse(
        cls,
        r0_fn: Callable[[float], float],
        r0_deriv: Callable[[float], float],
        kappa: float,
        x0: float,
        r1_bound: float | None = None,
    ) -> "RateEnvelope":
        """Build an envelope whose inverse is computed by bisection.

        The bracket for each inversion starts at [x0, x0 + 1] and doubles
        until R0 exceeds the target; R0 must therefore be unbounded above.
        """
        return cls(r0_fn, r0_deriv, _numeric_inverse(r0_fn, x0), kappa, x0, r1_bound)


def _numeric_inverse(r0_fn: Callable[[float], float], x0: float) -> Callable[[float], float]:
    y_min = r0_fn(x0)

    def inv(y: float) -> float:
        if y < y_min:
            raise DomainError(f"inverse argument {y} below R0(x0) = {y_min}")
        hi = x0 + 1.0
        for _ in range(200):
            if r0_fn(hi) > y:
                break
            hi = x0 + 2.0 * (hi - x0)
        else:
            raise BracketError(f"R0 never exceeded {y} while expanding the bracket")
        return generalized_inverse(r0_fn, y, (x0, hi))

    return inv


@dataclass(frozen=True)
class NormalizedStats:
    """Normalized running-maximum deviations at one horizon.

    s2 scales the deviation by log log t, s3 by log log log t; both share
    the same numerator r0(A0(t)) * (xbar - A0(t)).
    """

    t: float
    s2: float
    s3: float


def l2(t: float) -> float:
    """log log t; requires t > e."""
    if not t > E:
        raise DomainError(f"l2 needs t > e, got {t}")
    return math.log(math.log(t))


def l3(t: float) -> float:
    """log log log t; requires t > e^e."""
    if not t > EE:
        raise DomainError(f"l3 needs t > e^e ~ {EE:.4f}, got {t}")
    return math.log(math.log(math.log(t)))


def centering(env: RateEnvelope, alpha_t: float, t: float) -> float:
    """Centering term A0(t) = R0^{-1}(log(t / alpha_t)).

    alpha_t is the mean regeneration-cycle duration.  Requires
    t / alpha_t > exp(R0(x0)) so the inverse stays in the valid region.
    """
    if alpha_t <= 0.0 or t <= 0.0:
        raise DomainError("t and alpha_t must be positive")
    y = math.log(t / alpha_t)
    if not y > env.r0_fn(env.x0):
        raise DomainError(
            f"t/alpha_t = {t / alpha_t} not above exp(R0(x0)) = {math.exp(env.r0_fn(env.x0))}"
        )
    return env.r0_inv(y)


def normalized_stats(env: RateEnvelope, alpha_t: float, t: float, xbar: float) -> NormalizedStats:
    """Both normalized deviations of a running maximum at horizon t."""
    scale3 = l3(t)  # also enforces t > e^e
    scale2 = l2(t)
    a0 = centering(env, alpha_t, t)
    dev = env.r0_deriv(a0) * (xbar - a0)
    return NormalizedStats(t=t, s2=dev / scale2, s3=dev / scale3)


def check_regular_variation(
    f: Callable[[float], float],
    kappa: float,
    t_grid: Iterable[float],
    x_grid: Iterable[float],
) -> float:
    """Max over the grid of |f(t*x) / (f(t) * x^kappa) - 1|.

    A finite-grid diagnostic for regular variation with index kappa; it can
    refute but not prove the asymptotic property.
    """
    worst = 0.0
    for t in t_grid:
        ft = f(t)
        if not ft > 0.0:
            raise DomainError(f"f({t}) = {ft} is not positive")
        for x in x_grid:
            ftx = f(t * x)
            if not ftx > 0.0:
                raise DomainError(f"f({t * x}) = {ftx} is not positive")
            worst = max(worst, abs(ftx / (ft * x**kappa) - 1.0))
    return worst


class PowerSum(NamedTuple):
    exact: float
    asymptotic: float


def geometric_power_sum(p: float, b: float, n: int) -> PowerSum:
    """Sum_{k=1}^{n} p^k / k^b next to its closed asymptotic equivalent.

    The asymptotic form is p^(n+1) / ((p-1) * n^b); the ratio of the two
    tends to 1 as n grows.  Summation is compensated (math.fsum).  Raises
    OverflowError once p^(n+1) leaves the double range; use
    log_geometric_power_sum beyond that.
    """
    if not p > 1.0:
        raise DomainError(f"geometric growth needs p > 1, got {p}")
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if (n + 1) * math.log(p) > math.log(sys.float_info.max):
        raise OverflowError(
            f"p^(n+1) exceeds float range for p={p}, n={n}; use log_geometric_power_sum"
        )
    exact = math.fsum(p**k / float(k) ** b for k in range(1, n + 1))
    asymptotic = p ** (n + 1) / ((p - 1.0) * float(n) ** b)
    return PowerSum(exact=exact, asymptotic=asymptotic)


def log_geometric_power_sum(p: float, b: float, n: int) -> PowerSum:
    """Log-domain variant: (log of exact sum, log of asymptotic form)."""
    if not p > 1.0:
        raise DomainError(f"geometric growth needs p > 1, got {p}")
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    k = np.arange(1, n + 1, dtype=np.float64)
    log_exact = float(logsumexp(k * math.log(p) - b * np.log(k)))
    log_asym = (n + 1) * math.log(p) - math.log(p - 1.0) - b * math.log(n)
    return PowerSum(exact=log_exact, asymptotic=log_asym)


@dataclass(frozen=True)
class GrowthReport:
    """Measured growth of r0(R0^{-1}(x)) against log x and log log x.

    The flags record a decreasing trend of the ratios over the supplied
    grid.  They are advisory: a finite grid cannot decide an o(.) claim.
    """

    x_grid: tuple[float, ...]
    ratio_log: tuple[float, ...]
    ratio_loglog: tuple[float, ...]
    log_ok: bool
    loglog_ok: bool


def slow_growth_report(env: RateEnvelope, x_grid: Sequence[float]) -> GrowthReport:
    """Check how r0(R0^{-1}(x)) compares with log x and log log x on a grid.

    Boundedness of these ratios (tending to zero) is what licenses the
    lattice version of the normalization; constant-r0 envelopes pass
    trivially.
    """
    xs = [float(x) for x in x_grid]
    if not xs:
        raise DomainError("empty grid")
    y_min = env.r0_fn(env.x0)
    for x in xs:
        if x <= EE:
            raise DomainError(f"grid point {x} must exceed e^e for the log log ratio")
        if x < y_min:
            raise DomainError(f"grid point {x} below R0(x0) = {y_min}; inverse undefined")
    vals = [env.r0_deriv(env.r0_inv(x)) for x in xs]
    ratio_log = tuple(v / math.log(x) for v, x in zip(vals, xs))
    ratio_loglog = tuple(v / math.log(math.log(x)) for v, x in zip(vals, xs))
    return GrowthReport(
        x_grid=tuple(xs),
        ratio_log=ratio_log,
        ratio_loglog=ratio_loglog,
        log_ok=ratio_log[-1] < ratio_log[0],
        loglog_ok=ratio_loglog[-1] < ratio_loglog[0],
    )
