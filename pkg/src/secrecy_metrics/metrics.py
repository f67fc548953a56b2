"""Closed-form secrecy metrics for the fixed-rate wiretap code over Rayleigh fading."""

import math
from dataclasses import dataclass

from .channel_model import check_metric_rates, transmit_probability
from .errors import DomainError
from .special_functions import exp_integral_ei, scaled_e1

LN2 = math.log(2.0)
_DIRECT_EI_LIMIT = 700.0


@dataclass(frozen=True)
class SecrecyReport:
    p_out: float
    avg_equivocation: float
    leakage_rate: float
    p_tx: float
    throughput: float
    theta: float

    def as_dict(self):
        return {
            "theta": self.theta,
            "p_out": self.p_out,
            "avg_equivocation": self.avg_equivocation,
            "leakage_rate": self.leakage_rate,
            "p_tx": self.p_tx,
            "throughput": self.throughput,
        }


def check_theta(theta):
    try:
        theta = float(theta)
    except (TypeError, ValueError):
        raise DomainError(f"theta must be a real number, got {theta!r}") from None
    if not 0.0 < theta <= 1.0:
        raise DomainError(f"theta must lie in (0, 1], got {theta}")
    return theta


def outage_probability(stats, rates, theta):
    """Generalized secrecy outage probability ``P(Delta < theta)``.

    ``theta = 1`` gives the classical secrecy outage probability.
    """
    theta = check_theta(theta)
    exponent = rates.rate_codeword - theta * rates.rate_secret
    return math.exp(-math.expm1(exponent * LN2) / stats.avg_snr_eve)


def _shifted_ei(u, avg_snr_eve):
    """``exp(1/avg) * Ei(-u/avg)`` for ``u >= 1``, evaluated without overflow."""
    z = u / avg_snr_eve
    # e^{1/avg} Ei(-z) = -e^{1/avg - z} * (e^z E1(z)); the exponent is <= 0.
    return -math.exp((1.0 - u) / avg_snr_eve) * scaled_e1(z)


def avg_equivocation(stats, rates):
    """Average fractional equivocation ``E[Delta]`` over Eve's fading."""
    check_metric_rates(rates)
    rb, rs, ge = rates.rate_codeword, rates.rate_secret, stats.avg_snr_eve
    z_lo = 2.0 ** (rb - rs) / ge
    if z_lo <= _DIRECT_EI_LIMIT:
        # z_lo >= 1/ge, so exp(1/ge) cannot overflow here.
        diff = math.exp(1.0 / ge) * (exp_integral_ei(-(2.0 ** rb) / ge) - exp_integral_ei(-z_lo))
    else:
        diff = _shifted_ei(2.0 ** rb, ge) - _shifted_ei(2.0 ** (rb - rs), ge)
    return 1.0 - diff / (rs * LN2)


def leakage_rate(stats, rates):
    """Average information leakage rate, bits per channel use.

    Conditioned on a transmission taking place, so it carries no ``p_tx``
    factor. Computed from its own closed form; ``(1 - avg_equivocation) * Rs``
    must agree with it.
    """
    check_metric_rates(rates)
    rb, rs, ge = rates.rate_codeword, rates.rate_secret, stats.avg_snr_eve
    z_hi = 2.0 ** rb / ge
    z_lo = 2.0 ** (rb - rs) / ge
    # Ei(-z_hi) - Ei(-z_lo) = E1(z_lo) - E1(z_hi), both kept in scaled form.
    diff = (
        math.exp((1.0 - 2.0 ** (rb - rs)) / ge) * scaled_e1(z_lo)
        - math.exp((1.0 - 2.0 ** rb) / ge) * scaled_e1(z_hi)
    )
    return max(0.0, diff / LN2)


def throughput(stats, rates):
    """Secrecy throughput ``p_tx * Rs``."""
    return transmit_probability(stats, rates) * rates.rate_secret


def full_report(stats, rates, theta):
    theta = check_theta(theta)
    return SecrecyReport(
        p_out=outage_probability(stats, rates, theta),
        avg_equivocation=avg_equivocation(stats, rates),
        leakage_rate=leakage_rate(stats, rates),
        p_tx=transmit_probability(stats, rates),
        throughput=throughput(stats, rates),
        theta=theta,
    )
