import math

import numpy as np
import pytest

from secrecy_metrics import (
    ChannelStats,
    DomainError,
    RatePair,
    capacity,
    fractional_equivocation,
    pe_lower_bound,
    transmit_probability,
)

from oracles import mc_fraction

# Frozen Monte Carlo fractions P(log2(1 + snr_b) >= Rb), default_rng(12345), 1e6 draws.
PTX_MC = {(10.0, 1.0): (0.904765, 0.0002935), (1.0, 2.0): (0.049347, 0.0002166)}


@pytest.mark.parametrize("snr, expected", [(0.0, 0.0), (1.0, 1.0), (3.0, 2.0)])
def test_capacity(snr, expected):
    assert capacity(snr) == pytest.approx(expected, abs=1e-15)


def test_capacity_domain():
    with pytest.raises(DomainError):
        capacity(-0.1)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(avg_snr_bob=0.0, avg_snr_eve=1.0),
        dict(avg_snr_bob=1.0, avg_snr_eve=-1.0),
        dict(avg_snr_bob=math.inf, avg_snr_eve=1.0),
    ],
)
def test_channel_stats_validation(kwargs):
    with pytest.raises(DomainError):
        ChannelStats(**kwargs)


@pytest.mark.parametrize("rb, rs", [(0.5, 1.0), (1.0, 0.0), (1.0, -0.2), (math.nan, 0.5)])
def test_rate_pair_validation(rb, rs):
    with pytest.raises(DomainError):
        RatePair(rb, rs)


def test_equivocation_examples():
    assert fractional_equivocation(0.0, RatePair(1.0, 0.5)) == 1.0
    for rb, rs in [(1.0, 0.5), (2.5, 0.7), (3.0, 3.0)]:
        assert fractional_equivocation(2.0 ** rb - 1.0, RatePair(rb, rs)) == pytest.approx(0.0, abs=1e-15)
    assert fractional_equivocation(2.0 ** 0.5 - 1.0, RatePair(1.0, 1.0)) == pytest.approx(0.5, abs=1e-15)


def test_equivocation_piecewise_branches():
    rates = RatePair(2.0, 0.5)
    lo, hi = 2.0 ** 1.5 - 1.0, 2.0 ** 2.0 - 1.0
    assert fractional_equivocation(lo * 0.999, rates) == 1.0
    assert fractional_equivocation(hi * 1.001, rates) == 0.0
    mid = 0.5 * (lo + hi)
    assert fractional_equivocation(mid, rates) == pytest.approx((2.0 - math.log2(1 + mid)) / 0.5)


def test_equivocation_monotone_and_continuous():
    rates = RatePair(1.5, 0.6)
    snr = np.linspace(0.0, 5.0, 200001)
    d = fractional_equivocation(snr, rates)
    assert np.all((d >= 0) & (d <= 1))
    assert np.all(np.diff(d) <= 0)
    # Grid step 2.5e-5; the steepest slope is 1/(Rs ln2 (1+snr)) < 2.5.
    assert np.max(np.abs(np.diff(d))) < 1e-4


def test_ordinary_code_never_full_equivocation():
    rates = RatePair(1.0, 1.0)
    snr = np.logspace(-12, 3, 500)
    assert np.all(fractional_equivocation(snr, rates) < 1.0)


def test_transmit_probability_examples():
    assert transmit_probability(ChannelStats(10, 1), RatePair(1e-12, 1e-12)) == pytest.approx(1.0)
    assert transmit_probability(ChannelStats(10, 1), RatePair(1, 1)) == pytest.approx(math.exp(-0.1), rel=1e-14)
    assert transmit_probability(ChannelStats(1, 1), RatePair(2, 1)) == pytest.approx(math.exp(-3), rel=1e-14)


@pytest.mark.parametrize("key", sorted(PTX_MC))
def test_transmit_probability_against_frozen_mc(key):
    mean, se = PTX_MC[key]
    gb, rb = key
    assert abs(transmit_probability(ChannelStats(gb, 1.0), RatePair(rb, rb)) - mean) <= 4 * se


def test_transmit_probability_against_fresh_mc():
    rng = np.random.default_rng(2024)
    snr = rng.exponential(3.0, 1_000_000)
    p, se = mc_fraction(np.log2(1 + snr) >= 1.3)
    assert abs(transmit_probability(ChannelStats(3.0, 1.0), RatePair(1.3, 1.0)) - p) <= 4 * se


def test_transmit_probability_monotone():
    rbs = np.linspace(0.01, 5, 50)
    p = [transmit_probability(ChannelStats(5, 1), RatePair(rb, 0.01)) for rb in rbs]
    assert all(0 < v <= 1 for v in p)
    assert np.all(np.diff(p) < 0)
    g = [transmit_probability(ChannelStats(gb, 1), RatePair(1, 1)) for gb in np.linspace(0.1, 50, 50)]
    assert np.all(np.diff(g) > 0)


def test_pe_lower_bound():
    assert pe_lower_bound(1.0) == 1.0
    assert pe_lower_bound(1.0, math.inf) == 1.0
    assert pe_lower_bound(0.5, 10) == pytest.approx(0.4)
    assert pe_lower_bound(0.05, 10) == 0.0
    for bad in (0.0, -3.0):
        with pytest.raises(DomainError):
            pe_lower_bound(0.5, bad)
    with pytest.raises(DomainError):
        pe_lower_bound(1.5, 10)
