"""Compiled fast paths for the built-in models.

Each kernel consumes a numpy Generator directly, drawing in exactly the
same order and with exactly the same expressions as the pure-Python cycle
models, so a kernel run and an engine run from the same generator state
produce bit-identical checkpoint paths.  Tests assert that equality.

Distribution codes for the single-server kernels: 0 = exponential(scale),
1 = deterministic(value), 2 = uniform(lo, hi).
"""

from __future__ import annotations

import numpy as np
from numba import njit

EXP, DET, UNI = 0, 1, 2


@njit(inline="always")
def _draw(kind, p1, p2, rng):
    if kind == EXP:
        return rng.exponential(p1)
    elif kind == DET:
        return p1
    else:
        return rng.random() * (p2 - p1) + p1


@njit(cache=True)
def lindley_path(ia_kind, ia_p1, ia_p2, sv_kind, sv_p1, sv_p2, ts, t_max, max_customers, rng):
    """Checkpointed waiting-time running maximum of a GI/G/1 queue.

    Returns (xbars, counts, completed cycles within t_max, their total
    duration, their summed cycle maxima, ok flag).
    """
    m = ts.shape[0]
    xbars = np.empty(m, np.float64)
    counts = np.empty(m, np.int64)
    j = 0
    s_prev = 0.0
    z_done = -np.inf
    k_all = 0
    n_done = 0
    sum_time = 0.0
    sum_max = 0.0
    while j < m or s_prev <= t_max:
        cur = z_done
        while j < m and ts[j] - s_prev <= 0.0:  # checkpoint at the cycle-opening epoch
            xbars[j] = cur
            counts[j] = k_all
            j += 1
        if 0.0 > cur:
            cur = 0.0  # opener waits zero
        w = 0.0
        offset = 0.0
        wmax = 0.0
        count = 1
        duration = 0.0
        while True:
            eta = _draw(sv_kind, sv_p1, sv_p2, rng)
            zeta = _draw(ia_kind, ia_p1, ia_p2, rng)
            o = offset + zeta
            w = max(0.0, w + eta - zeta)
            while j < m and ts[j] - s_prev < o:  # determined strictly before this arrival
                xbars[j] = cur
                counts[j] = k_all
                j += 1
            if w == 0.0:
                duration = o
                break
            count += 1
            if count > max_customers:
                return xbars, counts, n_done, sum_time, sum_max, False
            while j < m and ts[j] - s_prev <= o:  # exactly at the arrival: pre-arrival max
                xbars[j] = cur
                counts[j] = k_all
                j += 1
            if w > wmax:
                wmax = w
                if w > cur:
                    cur = w
            offset = o
        z_done = cur
        s_prev = s_prev + duration
        k_all += 1
        if s_prev <= t_max:
            n_done += 1
            sum_time = s_prev
            sum_max += wmax
    return xbars, counts, n_done, sum_time, sum_max, True


@njit(cache=True)
def mmm_path(lam, mu, m_servers, ts, t_max, max_events, rng):
    """Checkpointed queue-length running maximum of an M/M/m queue."""
    m = ts.shape[0]
    xbars = np.empty(m, np.float64)
    counts = np.empty(m, np.int64)
    j = 0
    s_prev = 0.0
    z_done = -np.inf
    k_all = 0
    n_done = 0
    sum_time = 0.0
    sum_max = 0.0
    while j < m or s_prev <= t_max:
        cur = z_done
        while j < m and ts[j] - s_prev <= 0.0:
            xbars[j] = cur
            counts[j] = k_all
            j += 1
        if 1.0 > cur:
            cur = 1.0  # busy period opens in state 1
        k = 1
        kmax = 1
        elapsed = 0.0
        events = 0
        while k > 0:
            mk = k if k < m_servers else m_servers
            rate = lam + mu * mk
            elapsed += rng.exponential(1.0 / rate)
            o = elapsed
            while j < m and ts[j] - s_prev < o:
                xbars[j] = cur
                counts[j] = k_all
                j += 1
            if rng.random() < lam / rate:
                k += 1
                if k > kmax:
                    kmax = k
                    while j < m and ts[j] - s_prev <= o:
                        xbars[j] = cur
                        counts[j] = k_all
                        j += 1
                    if k > cur:
                        cur = float(k)
            else:
                k -= 1
            events += 1
            if events > max_events:
                return xbars, counts, n_done, sum_time, sum_max, False
        duration = elapsed + rng.exponential(1.0 / lam)
        while j < m and ts[j] - s_prev < duration:
            xbars[j] = cur
            counts[j] = k_all
            j += 1
        z_done = cur
        s_prev = s_prev + duration
        k_all += 1
        if s_prev <= t_max:
            n_done += 1
            sum_time = s_prev
            sum_max += float(kmax)
    return xbars, counts, n_done, sum_time, sum_max, True


@njit(cache=True)
def bd_path(lam, mu, a, ts, t_max, max_events, rng):
    """Checkpointed running maximum of the birth-death population."""
    m = ts.shape[0]
    xbars = np.empty(m, np.float64)
    counts = np.empty(m, np.int64)
    j = 0
    s_prev = 0.0
    z_done = -np.inf
    k_all = 0
    n_done = 0
    sum_time = 0.0
    sum_max = 0.0
    while j < m or s_prev <= t_max:
        cur = z_done
        while j < m and ts[j] - s_prev <= 0.0:
            xbars[j] = cur
            counts[j] = k_all
            j += 1
        if 0.0 > cur:
            cur = 0.0  # cycle opens at state 0
        idle = rng.exponential(1.0 / a)
        o = idle
        while j < m and ts[j] - s_prev < o:
            xbars[j] = cur
            counts[j] = k_all
            j += 1
        while j < m and ts[j] - s_prev <= o:
            xbars[j] = cur
            counts[j] = k_all
            j += 1
        if 1.0 > cur:
            cur = 1.0  # first birth
        k = 1
        kmax = 1
        elapsed = idle
        events = 1
        while k > 0:
            up = lam * k + a
            down = mu * k
            total = up + down
            elapsed += rng.exponential(1.0 / total)
            o = elapsed
            while j < m and ts[j] - s_prev < o:
                xbars[j] = cur
                counts[j] = k_all
                j += 1
            if rng.random() < up / total:
                k += 1
                if k > kmax:
                    kmax = k
                    while j < m and ts[j] - s_prev <= o:
                        xbars[j] = cur
                        counts[j] = k_all
                        j += 1
                    if k > cur:
                        cur = float(k)
            else:
                k -= 1
            events += 1
            if events > max_events:
                return xbars, counts, n_done, sum_time, sum_max, False
        duration = elapsed
        z_done = cur
        s_prev = s_prev + duration
        k_all += 1
        if s_prev <= t_max:
            n_done += 1
            sum_time = s_prev
            sum_max += float(kmax)
    return xbars, counts, n_done, sum_time, sum_max, True


@njit(cache=True)
def bd_hitting_time(lam, mu, a, target, initial, max_events, rng):
    """First-passage time of the birth-death process to ``target``."""
    k = initial
    t = 0.0
    events = 0
    while k != target:
        if k == 0:
            t += rng.exponential(1.0 / a)
            k = 1
        else:
            up = lam * k + a
            down = mu * k
            total = up + down
            t += rng.exponential(1.0 / total)
            if rng.random() < up / total:
                k += 1
            else:
                k -= 1
        events += 1
        if events > max_events:
            return 0.0, False
    return t, True


@njit(cache=True)
def lindley_cycle_stats(ia_kind, ia_p1, ia_p2, sv_kind, sv_p1, sv_p2, n_cycles, max_customers, rng):
    """Per-cycle (max wait, customer count, duration) for n_cycles cycles."""
    maxima = np.empty(n_cycles, np.float64)
    custs = np.empty(n_cycles, np.int64)
    durs = np.empty(n_cycles, np.float64)
    for c in range(n_cycles):
        w = 0.0
        offset = 0.0
        wmax = 0.0
        count = 1
        while True:
            eta = _draw(sv_kind, sv_p1, sv_p2, rng)
            zeta = _draw(ia_kind, ia_p1, ia_p2, rng)
            offset += zeta
            w = max(0.0, w + eta - zeta)
            if w == 0.0:
                break
            count += 1
            if count > max_customers:
                return maxima, custs, durs, False
            if w > wmax:
                wmax = w
        maxima[c] = wmax
        custs[c] = count
        durs[c] = offset
    return maxima, custs, durs, True


@njit(cache=True)
def mmm_cycle_stats(lam, mu, m_servers, n_cycles, max_events, rng):
    """Per-cycle (max queue length, duration) for n_cycles cycles."""
    maxima = np.empty(n_cycles, np.int64)
    durs = np.empty(n_cycles, np.float64)
    for c in range(n_cycles):
        k = 1
        kmax = 1
        elapsed = 0.0
        events = 0
        while k > 0:
            mk = k if k < m_servers else m_servers
            rate = lam + mu * mk
            elapsed += rng.exponential(1.0 / rate)
            if rng.random() < lam / rate:
                k += 1
                if k > kmax:
                    kmax = k
            else:
                k -= 1
            events += 1
            if events > max_events:
                return maxima, durs, False
        maxima[c] = kmax
        durs[c] = elapsed + rng.exponential(1.0 / lam)
    return maxima, durs, True


@njit(cache=True)
def bd_cycle_stats(lam, mu, a, n_cycles, max_events, rng):
    """Per-cycle (max state, duration) for n_cycles return-to-zero cycles."""
    maxima = np.empty(n_cycles, np.int64)
    durs = np.empty(n_cycles, np.float64)
    for c in range(n_cycles):
        elapsed = rng.exponential(1.0 / a)
        k = 1
        kmax = 1
        events = 1
        while k > 0:
            up = lam * k + a
            down = mu * k
            total = up + down
            elapsed += rng.exponential(1.0 / total)
            if rng.random() < up / total:
                k += 1
                if k > kmax:
                    kmax = k
            else:
                k -= 1
            events += 1
            if events > max_events:
                return maxima, durs, False
        maxima[c] = kmax
        durs[c] = elapsed
    return maxima, durs, True


@njit(cache=True)
def bd_occupation(lam, mu, a, n_events, k_top, n_batches, rng):
    """Occupation time by state over one long trajectory, split into batches.

    Returns (occ[batch, state] for states 0..k_top, total elapsed time).
    """
    occ = np.zeros((n_batches, k_top + 1), np.float64)
    k = 0
    total = 0.0
    for e in range(n_events):
        if k == 0:
            dt = rng.exponential(1.0 / a)
            nxt = 1
        else:
            up = lam * k + a
            down = mu * k
            tot = up + down
            dt = rng.exponential(1.0 / tot)
            if rng.random() < up / tot:
                nxt = k + 1
            else:
                nxt = k - 1
        if k <= k_top:
            occ[e * n_batches // n_events, k] += dt
        total += dt
        k = nxt
    return occ, total
