import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from secrecy_metrics import (
    ChannelStats,
    DomainError,
    RatePair,
    avg_equivocation,
    full_report,
    leakage_rate,
    outage_probability,
    throughput,
)

from oracles import ei_quadrature, lambert_w_bisect, mc_fraction

# Frozen with numpy default_rng(12345), 1e6 Eve draws at avg SNR 1: (mean, std error).
POUT_MC = {(1.0, 0.5, 1.0): (0.660864, 0.000473), (1.0, 1.0, 0.6): (0.726336, 0.000446)}
AVG_EQ_MC = (0.33115999, 0.00033954)
LEAK_MC = (0.66884001, 0.00033954)


def test_ordinary_code_classical_outage_is_one():
    for ge in (0.1, 1.0, 10.0, 1000.0):
        assert outage_probability(ChannelStats(10, ge), RatePair(1.3, 1.3), 1.0) == 1.0


@pytest.mark.parametrize("key", sorted(POUT_MC))
def test_outage_against_frozen_mc(key):
    rb, rs, theta = key
    mean, se = POUT_MC[key]
    value = outage_probability(ChannelStats(10, 1), RatePair(rb, rs), theta)
    assert abs(value - mean) <= 4 * se


def test_outage_closed_values():
    s = ChannelStats(10, 1)
    assert outage_probability(s, RatePair(1, 0.5), 1) == pytest.approx(math.exp(-(math.sqrt(2) - 1)), rel=1e-14)
    assert outage_probability(s, RatePair(1, 1), 0.6) == pytest.approx(math.exp(-(2 ** 0.4 - 1)), rel=1e-14)


@pytest.mark.parametrize("theta", [0.0, -0.1, 1.0000001, math.nan])
def test_outage_theta_domain(theta):
    with pytest.raises(DomainError):
        outage_probability(ChannelStats(1, 1), RatePair(1, 0.5), theta)


def test_avg_equivocation_against_frozen_mc():
    mean, se = AVG_EQ_MC
    assert abs(avg_equivocation(ChannelStats(10, 1), RatePair(1, 1)) - mean) <= 3 * se


def test_avg_equivocation_against_quadrature():
    # E[Delta] integrated directly over the exponential density.
    from scipy.integrate import quad

    for ge, rb, rs in [(1.0, 1.0, 1.0), (2.0, 1.0, 0.3), (0.3, 2.5, 1.1), (15.0, 3.0, 0.05)]:
        lo, hi = 2.0 ** (rb - rs) - 1.0, 2.0 ** rb - 1.0
        f = lambda g: (rb - math.log2(1 + g)) / rs * math.exp(-g / ge) / ge
        ref = (1.0 - math.exp(-lo / ge)) + quad(f, lo, hi, epsabs=1e-14, epsrel=1e-12)[0]
        assert avg_equivocation(ChannelStats(1, ge), RatePair(rb, rs)) == pytest.approx(ref, abs=1e-10)


def test_avg_equivocation_uses_ei_consistently():
    ge, rb, rs = 1.0, 1.0, 1.0
    expected = 1 - math.exp(1 / ge) * (ei_quadrature(-2 ** rb / ge) - ei_quadrature(-2 ** (rb - rs) / ge)) / (rs * math.log(2))
    assert avg_equivocation(ChannelStats(1, ge), RatePair(rb, rs)) == pytest.approx(expected, rel=1e-12)


def test_avg_equivocation_fig3_behaviour():
    r = RatePair(1, 1)
    assert avg_equivocation(ChannelStats(1, 2), r) < avg_equivocation(ChannelStats(1, 1), r)
    rs_grid = np.linspace(0.01, 1.0, 40)
    for ge in (1.0, 2.0):
        vals = [avg_equivocation(ChannelStats(1, ge), RatePair(1, rs)) for rs in rs_grid]
        assert all(0 < v < 1 for v in vals)
        assert np.all(np.diff(vals) < 0)


def test_avg_equivocation_small_rate_limit():
    # As Rs -> 0 the average tends to P(snr_e <= 2^Rb - 1) from below.
    s, rb = ChannelStats(1, 1.0), 1.0
    limit = 1 - math.exp(-(2 ** rb - 1) / 1.0)
    vals = [avg_equivocation(s, RatePair(rb, rs)) for rs in (1e-2, 1e-3, 1e-4, 1e-5)]
    gaps = [abs(v - limit) for v in vals]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-5


def test_tiny_secret_rate_rejected():
    with pytest.raises(DomainError):
        avg_equivocation(ChannelStats(1, 1), RatePair(1, 1e-10))
    with pytest.raises(DomainError):
        leakage_rate(ChannelStats(1, 1), RatePair(1, 1e-10))


def test_leakage_against_frozen_mc():
    mean, se = LEAK_MC
    assert abs(leakage_rate(ChannelStats(10, 1), RatePair(1, 1)) - mean) <= 3 * se


def test_leakage_limits():
    assert leakage_rate(ChannelStats(1, 1), RatePair(1, 1e-6)) < 1e-6
    prev = 0.0
    for ge in (1.0, 10.0, 1e2, 1e3, 1e4):
        v = leakage_rate(ChannelStats(1, ge), RatePair(1, 1))
        assert prev < v < 1.0
        prev = v


def test_throughput_examples():
    assert throughput(ChannelStats(10, 1), RatePair(1e-9, 1e-9)) < 1e-8
    assert throughput(ChannelStats(10, 1), RatePair(1, 1)) == pytest.approx(math.exp(-0.1), rel=1e-14)
    x = lambert_w_bisect(10.0) / math.log(2)
    assert throughput(ChannelStats(10, 1), RatePair(x, x)) == pytest.approx(1.569, abs=5e-4)


def test_full_report_bundle():
    r = full_report(ChannelStats(10, 1), RatePair(1, 1), 1.0)
    assert r.p_out == 1.0
    assert r.avg_equivocation == pytest.approx(avg_equivocation(ChannelStats(10, 1), RatePair(1, 1)))
    assert r.p_tx == pytest.approx(math.exp(-0.1))
    assert r.throughput == pytest.approx(math.exp(-0.1))
    assert abs(r.leakage_rate - (1 - r.avg_equivocation) * 1.0) <= 1e-12
    near = full_report(ChannelStats(10, 1), RatePair(1, 0.7), 0.999999)
    exact = full_report(ChannelStats(10, 1), RatePair(1, 0.7), 1.0)
    assert abs(near.p_out - exact.p_out) < 1e-4


rate_inputs = st.tuples(
    st.floats(0.1, 20.0), st.floats(0.1, 30.0), st.floats(0.2, 4.0), st.floats(0.001, 1.0), st.floats(0.001, 1.0)
)


@settings(max_examples=300)
@given(rate_inputs)
def test_report_invariants(params):
    ge, gb, rb, frac, theta = params
    stats, rates = ChannelStats(gb, ge), RatePair(rb, rb * frac)
    r = full_report(stats, rates, theta)
    assert 0 < r.p_out <= 1
    assert 0 <= r.avg_equivocation <= 1
    assert 0 <= r.leakage_rate <= rates.rate_secret
    assert abs(r.leakage_rate - (1 - r.avg_equivocation) * rates.rate_secret) <= 1e-12
    assert abs(r.throughput - r.p_tx * rates.rate_secret) <= 1e-12
    classical = math.exp(-(2 ** (rb - rates.rate_secret) - 1) / ge)
    assert abs(outage_probability(stats, rates, 1.0) - classical) <= 1e-12


def test_monotonicity_grids():
    rates = RatePair(2.0, 1.2)
    thetas = np.linspace(0.05, 1.0, 20)
    p = [outage_probability(ChannelStats(1, 3), rates, t) for t in thetas]
    assert np.all(np.diff(p) >= 0)
    ges = np.linspace(0.1, 20, 20)
    p = [outage_probability(ChannelStats(1, g), rates, 0.7) for g in ges]
    d = [avg_equivocation(ChannelStats(1, g), rates) for g in ges]
    leak = [leakage_rate(ChannelStats(1, g), rates) for g in ges]
    assert np.all(np.diff(p) >= 0)
    assert np.all(np.diff(d) <= 0)
    assert np.all(np.diff(leak) >= 0)
    rss = np.linspace(0.01, 2.0, 20)
    leak = [leakage_rate(ChannelStats(1, 3), RatePair(2.0, rs)) for rs in rss]
    assert np.all(np.diff(leak) >= 0)


def test_outage_matches_fresh_mc_definition():
    rng = np.random.default_rng(99)
    snr = rng.exponential(2.0, 1_000_000)
    rb, rs, theta = 2.0, 1.5, 0.7
    delta = np.clip((rb - np.log2(1 + snr)) / rs, 0, 1)
    p, se = mc_fraction(delta < theta)
    assert abs(outage_probability(ChannelStats(1, 2.0), RatePair(rb, rs), theta) - p) <= 4 * se


def test_extreme_snr_is_finite():
    for ge in (1e-4, 1e-2, 1e4):
        r = full_report(ChannelStats(1, ge), RatePair(3.0, 0.5), 0.5)
        assert all(math.isfinite(v) for v in r.as_dict().values())
