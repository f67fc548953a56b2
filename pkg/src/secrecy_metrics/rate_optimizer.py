"""Throughput-constrained wiretap rate design.

Every design problem maximizes or minimizes one secrecy metric subject to
``p_tx * Rs >= gamma`` and ``Rb >= Rs > 0``. For each candidate secret rate
``x`` the best codeword rate is the largest one meeting the throughput
floor, ``Rb(x) = log2(1 - avg_snr_bob * ln(gamma / x))``, which leaves a
scalar search over ``x`` in ``[rs_min, rs_max]``: the two roots of
``x * exp(-(2**x - 1) / avg_snr_bob) = gamma``.
"""

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import metrics
from .channel_model import ChannelStats, RatePair
from .errors import DomainError, InfeasibleError
from .special_functions import lambert_w0, scaled_e1

log = logging.getLogger(__name__)

LN2 = math.log(2.0)
OBJECTIVES = ("outage", "equivocation", "leakage")
GOLDEN_TOL = 1e-8
COARSE_SCAN_POINTS = 512
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Binding(enum.Flag):
    NONE = 0
    THROUGHPUT_BINDING = enum.auto()
    INTERIOR_OPTIMUM = enum.auto()
    BOUNDARY_RS_MIN = enum.auto()
    BOUNDARY_RS_MAX = enum.auto()

    def names(self):
        return [m.name.lower() for m in Binding if m and m in self]


@dataclass(frozen=True)
class DesignProblem:
    stats: ChannelStats
    gamma: float
    objective: str = "outage"
    theta: float = 1.0

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise DomainError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        g = float(self.gamma)
        if not math.isfinite(g) or g <= 0.0:
            raise DomainError(f"throughput floor must be finite and > 0, got {self.gamma}")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "theta", metrics.check_theta(self.theta))


@dataclass(frozen=True)
class FeasibleRsInterval:
    rs_min: float
    rs_max: float


@dataclass(frozen=True)
class DesignSolution:
    rate_b: float
    rate_s: float
    objective_value: float
    binding: Binding

    @property
    def rates(self):
        return RatePair(self.rate_b, self.rate_s)


def equal_rate_throughput(x, avg_snr_bob):
    """Throughput with ``Rb = Rs = x``; the largest throughput any pair with secret rate ``x`` achieves."""
    return x * math.exp(-math.expm1(x * LN2) / avg_snr_bob)


def max_throughput(stats):
    """Return ``(rs_peak, gamma_max)``: maximizer and maximum of the equal-rate throughput."""
    rs_peak = lambert_w0(stats.avg_snr_bob) / LN2
    return rs_peak, equal_rate_throughput(rs_peak, stats.avg_snr_bob)


def bisect(f, lo, hi, max_iter=200):
    """Root of ``f`` on ``[lo, hi]`` given a sign change, refined to adjacent floats."""
    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_section_min(f, lo, hi, tol=GOLDEN_TOL, max_iter=200):
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
    best = min([(f1, x1), (f2, x2), (f(lo), lo), (f(hi), hi)], key=lambda p: (p[0], p[1]))
    return best[1], best[0]


def feasible_interval(stats, gamma):
    """Range of secret rates for which some codeword rate meets the throughput floor."""
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma <= 0.0:
        raise DomainError(f"throughput floor must be finite and > 0, got {gamma}")
    rs_peak, gamma_max = max_throughput(stats)
    if gamma > gamma_max * (1.0 + 1e-12):
        raise InfeasibleError(
            f"throughput floor {gamma:.9g} exceeds the maximum achievable {gamma_max:.9g}"
        )
    if gamma >= gamma_max:
        return FeasibleRsInterval(rs_peak, rs_peak)

    def g(x):
        return equal_rate_throughput(x, stats.avg_snr_bob) - gamma

    # The equal-rate throughput is below x, so g(gamma) < 0 and gamma brackets the lower root.
    rs_min = bisect(g, gamma, rs_peak)
    hi = 2.0 * rs_peak
    while g(hi) > 0.0:
        hi *= 2.0
    rs_max = bisect(g, rs_peak, hi)
    return FeasibleRsInterval(rs_min, rs_max)


def boundary_rate_b(stats, gamma, x):
    """Largest codeword rate whose throughput with secret rate ``x`` still meets ``gamma``."""
    rb = math.log2(1.0 - stats.avg_snr_bob * math.log(gamma / x))
    # At the interval ends rb equals x up to rounding.
    return max(rb, x)


def outage_stationarity(stats, gamma, x):
    """Slope of ``Rb(x)`` in ``x``; the outage optimum is where it equals ``theta``."""
    gb = stats.avg_snr_bob
    return gb / (x * LN2 * (1.0 - gb * math.log(gamma / x)))


def _ei_gap(stats, gamma, x):
    """``e^{1/g_e} * (Ei(-B/g_e) - Ei(-B/(g_e 2^x)))`` with ``B = 1 - g_b ln(gamma/x)``.

    The constant factor ``e^{1/g_e}`` does not move the minimizer and keeps
    the evaluation in a range free of underflow.
    """
    ge = stats.avg_snr_eve
    big = 1.0 - stats.avg_snr_bob * math.log(gamma / x)
    small = big / 2.0 ** x
    return (
        math.exp((1.0 - small) / ge) * scaled_e1(small / ge)
        - math.exp((1.0 - big) / ge) * scaled_e1(big / ge)
    )


def equivocation_objective(stats, gamma, x):
    """Quantity whose minimum over ``x`` maximizes the average equivocation."""
    return _ei_gap(stats, gamma, x) / x


def leakage_objective(stats, gamma, x):
    """Quantity whose minimum over ``x`` minimizes the leakage rate."""
    return _ei_gap(stats, gamma, x)


def metric_value(objective, stats, rates, theta):
    if objective == "outage":
        return metrics.outage_probability(stats, rates, theta)
    if objective == "equivocation":
        return metrics.avg_equivocation(stats, rates)
    return metrics.leakage_rate(stats, rates)


def _solution(problem, interval, x, binding):
    stats, gamma = problem.stats, problem.gamma
    if interval.rs_min == interval.rs_max:
        x = interval.rs_min
        binding = Binding.BOUNDARY_RS_MIN | Binding.BOUNDARY_RS_MAX
    elif x <= interval.rs_min:
        binding = Binding.BOUNDARY_RS_MIN
    elif x >= interval.rs_max:
        binding = Binding.BOUNDARY_RS_MAX
    rb = boundary_rate_b(stats, gamma, x)
    value = metric_value(problem.objective, stats, RatePair(rb, x), problem.theta)
    return DesignSolution(rb, x, value, binding | Binding.THROUGHPUT_BINDING)


def _check_decreasing(f, lo, hi, n=64):
    xs = np.linspace(lo, hi, n)
    vals = [f(x) for x in xs]
    if any(b >= a for a, b in zip(vals, vals[1:])):
        raise RuntimeError("outage stationarity function is not strictly decreasing")


def optimize_outage(problem, interval=None):
    """Minimize the generalized secrecy outage probability.

    The secret rate is the root of ``slope(x) = theta`` clamped to the
    feasible interval; the slope is strictly decreasing, so the clamp picks
    the right endpoint when no root exists.
    """
    stats, gamma, theta = problem.stats, problem.gamma, problem.theta
    interval = interval or feasible_interval(stats, gamma)
    lo, hi = interval.rs_min, interval.rs_max
    if lo == hi:
        return _solution(problem, interval, lo, Binding.NONE)

    def slope(x):
        return outage_stationarity(stats, gamma, x)

    _check_decreasing(slope, lo, hi)
    if slope(lo) <= theta:
        x = lo
    elif slope(hi) >= theta:
        x = hi
    else:
        x = bisect(lambda t: slope(t) - theta, lo, hi)
    return _solution(problem, interval, x, Binding.INTERIOR_OPTIMUM)


def _scalar_minimize(f, lo, hi):
    """Golden-section search cross-checked by a coarse scan; the better point wins.

    If the scan finds a better point than the first search (the objective
    is not unimodal), the search is repeated inside the scan's best bracket.
    Ties go to the smaller ``x``.
    """
    x_gs, f_gs = golden_section_min(f, lo, hi)
    xs = np.linspace(lo, hi, COARSE_SCAN_POINTS)
    vals = np.array([f(x) for x in xs])
    k = int(np.argmin(vals))
    if vals[k] < f_gs:
        log.debug("coarse scan beat golden section (%.3g < %.3g)", vals[k], f_gs)
        a = xs[max(k - 1, 0)]
        b = xs[min(k + 1, len(xs) - 1)]
        x_ref, f_ref = golden_section_min(f, a, b)
        candidates = [(f_gs, x_gs), (float(vals[k]), float(xs[k])), (f_ref, x_ref)]
        f_gs, x_gs = min(candidates, key=lambda p: (p[0], p[1]))
    return x_gs


def _check_rate_b_sign(stats, rates):
    # d/dRb of the equivocation objective must be negative for the
    # max-Rb reduction to hold.
    ge = stats.avg_snr_eve
    rb, rs = rates.rate_codeword, rates.rate_secret
    slope = (LN2 / rs) * (math.exp(-(2.0 ** rb) / ge) - math.exp(-(2.0 ** (rb - rs)) / ge))
    if not slope < 0.0:
        log.warning("objective not decreasing in Rb at Rb=%.9g Rs=%.9g (slope %.3g)", rb, rs, slope)
    return slope


def _optimize_scalar(problem, objective, interval):
    stats, gamma = problem.stats, problem.gamma
    interval = interval or feasible_interval(stats, gamma)
    lo, hi = interval.rs_min, interval.rs_max
    if lo == hi:
        return _solution(problem, interval, lo, Binding.NONE)
    x = _scalar_minimize(lambda t: objective(stats, gamma, t), lo, hi)
    sol = _solution(problem, interval, x, Binding.INTERIOR_OPTIMUM)
    _check_rate_b_sign(stats, sol.rates)
    return sol


def optimize_equivocation(problem, interval=None):
    """Maximize the average fractional equivocation."""
    return _optimize_scalar(problem, equivocation_objective, interval)


def optimize_leakage(problem, interval=None):
    """Minimize the average information leakage rate."""
    return _optimize_scalar(problem, leakage_objective, interval)


def optimize(problem):
    solver = {
        "outage": optimize_outage,
        "equivocation": optimize_equivocation,
        "leakage": optimize_leakage,
    }[problem.objective]
    return solver(problem)


def brute_force_optimize(problem, grid_n=4000):
    """Exhaustive search over ``grid_n`` secret rates spanning the feasible interval.

    Each point is scored by the closed-form metric itself, not by the
    reduced objectives the analytic solvers use. Ties go to the lower index.
    """
    if grid_n < 100:
        raise DomainError(f"grid_n must be >= 100, got {grid_n}")
    stats, gamma = problem.stats, problem.gamma
    interval = feasible_interval(stats, gamma)
    if interval.rs_min == interval.rs_max:
        return _solution(problem, interval, interval.rs_min, Binding.NONE)
    sign = -1.0 if problem.objective == "equivocation" else 1.0
    best_x, best_score = None, math.inf
    for x in np.linspace(interval.rs_min, interval.rs_max, grid_n):
        x = float(x)
        rates = RatePair(boundary_rate_b(stats, gamma, x), x)
        score = sign * metric_value(problem.objective, stats, rates, problem.theta)
        if score < best_score:
            best_x, best_score = x, score
    return _solution(problem, interval, best_x, Binding.INTERIOR_OPTIMUM)
