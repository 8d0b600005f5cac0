import math

import numpy as np
import pytest

from regenmax import (
    BDSpec,
    BracketError,
    DomainError,
    RateEnvelope,
    bd_envelope,
    centering,
    check_regular_variation,
    generalized_inverse,
    geometric_power_sum,
    gig1_envelope,
    GiG1Spec,
    l2,
    l3,
    log_geometric_power_sum,
    mmm_envelope,
    MMmSpec,
    normalized_stats,
    slow_growth_report,
)

EE = math.exp(math.e)


# ---------------------------------------------------------------------------
# generalized inverse


def test_inverse_identity():
    assert generalized_inverse(lambda x: x, 2.0, (0.0, 10.0)) == pytest.approx(2.0, abs=1e-8)


def test_inverse_linear_log2():
    # x * log 2 = log 8 has the exact solution 3
    got = generalized_inverse(lambda x: x * math.log(2.0), math.log(8.0), (0.0, 100.0))
    assert got == pytest.approx(3.0, abs=1e-7)


def test_inverse_step_function():
    # floor never exceeds 1.5 before x = 2, so the infimum is 2
    got = generalized_inverse(math.floor, 1.5, (0.0, 10.0))
    assert got == pytest.approx(2.0, abs=1e-6)


def test_inverse_bracket_error():
    with pytest.raises(BracketError):
        generalized_inverse(lambda x: x, 20.0, (0.0, 10.0))


def test_inverse_left_edge():
    assert generalized_inverse(lambda x: x, -1.0, (0.0, 10.0)) == 0.0


def _random_monotone_functions(seed, count):
    r = np.random.default_rng(seed)
    for _ in range(count):
        c = r.uniform(0.05, 2.0, size=4)
        yield lambda x, c=c: c[0] * x + c[1] * x**3 + c[2] * math.log1p(max(x, 0.0)) + c[3] * (
            1.0 - math.exp(-x)
        )


def test_inverse_galois_and_monotone_sample():
    # fuller 1000-function sweep lives in the acceptance suite
    r = np.random.default_rng(7)
    for h in _random_monotone_functions(3, 100):
        hi = 50.0
        y1, y2 = sorted(r.uniform(h(0.0), h(hi), size=2))
        x1 = generalized_inverse(h, y1, (0.0, hi))
        x2 = generalized_inverse(h, y2, (0.0, hi))
        assert x1 <= x2
        assert h(x1) == pytest.approx(y1, rel=1e-8, abs=1e-8)


# ---------------------------------------------------------------------------
# iterated logarithms and centering


def test_l2_l3_unit_points():
    assert l2(math.exp(math.e)) == pytest.approx(1.0, rel=1e-12)
    assert l3(math.exp(math.exp(math.e))) == pytest.approx(1.0, rel=1e-12)
    assert l2(1e6) == pytest.approx(2.625791914476011, rel=1e-12)


def test_l2_l3_domain_errors():
    with pytest.raises(DomainError):
        l2(math.e)
    with pytest.raises(DomainError):
        l3(EE)
    with pytest.raises(DomainError):
        l3(5.0)


def test_centering_identity_rate(unit_exp_envelope):
    assert centering(unit_exp_envelope, 1.0, math.exp(5.0)) == pytest.approx(5.0, rel=1e-12)


def test_centering_mmm_analytic():
    env = mmm_envelope(MMmSpec(0.5, 1.0, 1))
    t = math.exp(10.0 * math.log(2.0))
    assert centering(env, 1.0, t) == pytest.approx(10.0, rel=1e-12)


def test_centering_domain_error(unit_exp_envelope):
    with pytest.raises(DomainError):
        centering(unit_exp_envelope, 1.0, 1.0)  # log(t/alpha) = 0 = R0(x0)


def test_centering_bd_expansion_bounded():
    # numeric inverse should track (log t + log log t) / log 2 within an O(1) band
    spec = BDSpec(0.5, 1.0, 0.5)  # a/lam = 1, rho = 1/2
    env = bd_envelope(spec)
    diffs = []
    for exponent in (3, 6, 9, 12):
        t = 10.0**exponent
        ref = (math.log(t) + l2(t)) / math.log(2.0)
        diffs.append(centering(env, 1.0, t) - ref)
    assert all(0.5 < d < 1.2 for d in diffs)
    assert all(a > b for a, b in zip(diffs, diffs[1:]))  # settles monotonically


# ---------------------------------------------------------------------------
# normalized statistics


def test_stats_centered_is_zero(unit_exp_envelope):
    st = normalized_stats(unit_exp_envelope, 1.0, 1e4, centering(unit_exp_envelope, 1.0, 1e4))
    assert st.s2 == 0.0 and st.s3 == 0.0


def test_stats_unit_deviation_near_ee(unit_exp_envelope):
    # just above e^e the double log is ~1, so a unit deviation gives s2 ~ 1
    t = EE * (1.0 + 1e-9)
    st = normalized_stats(unit_exp_envelope, 1.0, t, centering(unit_exp_envelope, 1.0, t) + 1.0)
    assert st.s2 == pytest.approx(1.0, rel=1e-8)


def test_stats_rejects_t_at_ee(unit_exp_envelope):
    with pytest.raises(DomainError):
        normalized_stats(unit_exp_envelope, 1.0, EE, 3.0)


def test_stats_shared_numerator(unit_exp_envelope):
    for t in (1e2, 1e5, 1e9):
        st = normalized_stats(unit_exp_envelope, 1.0, t, 1.7 * centering(unit_exp_envelope, 1.0, t))
        assert st.s2 * l2(t) == pytest.approx(st.s3 * l3(t), rel=1e-12)


def test_stats_mm1_corollary_identity():
    # s2 * L2 differs from (gamma*xbar - log t) by exactly log(alpha_t)
    spec = GiG1Spec.mm1(0.5, 1.0)
    env = gig1_envelope(spec)
    gamma, alpha_t = 0.5, spec.alpha_t_closed_form()
    for xbar in (30.0, 40.0, 55.0):
        st = normalized_stats(env, alpha_t, 1e8, xbar)
        direct = (gamma * xbar - math.log(1e8)) / l2(1e8)
        assert st.s2 - direct == pytest.approx(math.log(alpha_t) / l2(1e8), rel=1e-9)
    # the gap shrinks (slowly) on the double-log scale
    gaps = [math.log(alpha_t) / l2(t) for t in (1e8, 1e16, 1e32, 1e64)]
    assert all(a > b > 0 for a, b in zip(gaps, gaps[1:]))


# ---------------------------------------------------------------------------
# regular variation diagnostic


def test_rv_pure_power():
    dev = check_regular_variation(lambda x: x**2, 2.0, [1e3, 1e4], [2.0, 5.0])
    assert dev == pytest.approx(0.0, abs=1e-12)


def test_rv_log_factor():
    dev = check_regular_variation(lambda x: x * math.log(x), 1.0, [1e5], [2.0])
    assert dev == pytest.approx(0.06020599913279612, rel=1e-10)


def test_rv_constant_inverse_derivative():
    # (R0^{-1})' is constant when R0 is linear
    gamma = 0.5
    dev = check_regular_variation(lambda x: 1.0 / gamma + 0.0 * x, 0.0, [1e3, 1e5], [2.0, 10.0])
    assert dev == pytest.approx(0.0, abs=1e-12)


def test_rv_rejects_nonpositive():
    with pytest.raises(DomainError):
        check_regular_variation(lambda x: -x, 1.0, [10.0], [2.0])


def _inv_deriv(env, y):
    return 1.0 / env.r0_deriv(env.r0_inv(y))


@pytest.mark.parametrize(
    "env_builder",
    [
        lambda: gig1_envelope(GiG1Spec.mm1(0.5, 1.0)),
        lambda: mmm_envelope(MMmSpec(0.5, 1.0, 1)),
        lambda: bd_envelope(BDSpec(0.5, 1.0, 0.5)),
    ],
)
def test_builtin_envelope_contract(env_builder):
    env = env_builder()
    # round trip through the inverse
    y0 = env.r0_fn(env.x0)
    for y in (y0 + 0.5, y0 + 3.0, 20.0, 200.0):
        back = env.r0_fn(env.r0_inv(y))
        assert abs(back - y) <= 1e-9 * max(1.0, abs(y))
    # strict monotonicity beyond x0
    xs = env.x0 + np.linspace(0.1, 50.0, 40)
    vals = [env.r0_fn(float(x)) for x in xs]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert all(env.r0_deriv(float(x)) > 0 for x in xs)
    # regular variation of the inverse derivative with index kappa
    for t in (1e3, 1e4, 1e5):
        for x in (2.0, 5.0, 10.0):
            ratio = _inv_deriv(env, t * x) / (_inv_deriv(env, t) * x**env.kappa)
            assert abs(ratio - 1.0) < 0.01
    # slowly-varying sequence limit: c_n = n, d_n = n + sqrt(n)
    n = 1e6
    assert _inv_deriv(env, n) / _inv_deriv(env, n + math.sqrt(n)) == pytest.approx(1.0, abs=1e-3)


# ---------------------------------------------------------------------------
# geometric power sums


def test_power_sum_geometric_series():
    res = geometric_power_sum(2.0, 0.0, 10)
    assert res.exact == 2.0**11 - 2.0
    assert res.asymptotic == 2.0**11
    assert res.exact / res.asymptotic == pytest.approx(0.999023, abs=1e-6)


def test_power_sum_single_term():
    res = geometric_power_sum(2.0, 1.0, 1)
    assert res.exact == 2.0
    assert res.asymptotic == 4.0


@pytest.mark.parametrize(
    "p,b,ratio200",
    [
        (2.0, 1.0, 1.0050766736427197),
        (2.0, -1.0, 0.995),
        (1.5, 2.0, 1.0207894662270234),
    ],
)
def test_power_sum_ratio_monotone_approach(p, b, ratio200):
    ratios = [geometric_power_sum(p, b, n).exact / geometric_power_sum(p, b, n).asymptotic
              for n in (25, 50, 100, 200)]
    assert ratios[-1] == pytest.approx(ratio200, rel=1e-12)
    gaps = [abs(r - 1.0) for r in ratios]
    assert all(a > b_ for a, b_ in zip(gaps, gaps[1:]))


def test_power_sum_overflow_and_log_variant():
    with pytest.raises(OverflowError):
        geometric_power_sum(2.0, 1.0, 2000)
    res = log_geometric_power_sum(2.0, 1.0, 2000)
    assert res.exact == pytest.approx(res.asymptotic, abs=2e-3)
    # log route agrees with the direct route where both exist
    small = geometric_power_sum(2.0, 1.0, 100)
    logged = log_geometric_power_sum(2.0, 1.0, 100)
    assert math.log(small.exact) == pytest.approx(logged.exact, rel=1e-12)


def test_power_sum_rejects_bad_growth():
    with pytest.raises(DomainError):
        geometric_power_sum(1.0, 0.0, 10)


# ---------------------------------------------------------------------------
# slow-growth report


def test_growth_constant_rate_passes():
    env = mmm_envelope(MMmSpec(0.5, 1.0, 1))
    rep = slow_growth_report(env, [20.0, 100.0, 1000.0, 10000.0])
    assert rep.log_ok and rep.loglog_ok
    assert rep.ratio_log[-1] < 0.1


def test_growth_bd_bounded_rate_passes():
    env = bd_envelope(BDSpec(0.5, 1.0, 0.5))
    rep = slow_growth_report(env, [20.0, 100.0, 1000.0, 10000.0])
    assert rep.log_ok and rep.loglog_ok


def test_growth_exponential_rate_fails():
    env = RateEnvelope(
        r0_fn=lambda x: math.exp(x),
        r0_deriv=lambda x: math.exp(x),
        r0_inv=lambda y: math.log(y),
        kappa=0.0,
        x0=0.0,
    )
    rep = slow_growth_report(env, [20.0, 100.0, 1000.0])
    assert not rep.log_ok and not rep.loglog_ok
    assert rep.ratio_log[-1] > rep.ratio_log[0]


def test_growth_rejects_small_grid_points():
    env = mmm_envelope(MMmSpec(0.5, 1.0, 1))
    with pytest.raises(DomainError):
        slow_growth_report(env, [2.0, 100.0])
