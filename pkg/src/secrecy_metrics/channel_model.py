"""Quasi-static Rayleigh wiretap channel with a fixed-rate wiretap code.

All SNRs are linear power ratios. Rates are in bits per channel use.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# Below this confidential rate the closed forms degenerate to 0/0.
MIN_RATE_SECRET = 1e-9

INFINITE = math.inf


def _finite(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class ChannelStats:
    """Average received SNRs at Bob and Eve (linear scale)."""

    avg_snr_bob: float
    avg_snr_eve: float

    def __post_init__(self):
        for name in ("avg_snr_bob", "avg_snr_eve"):
            v = _finite(getattr(self, name), name)
            if v <= 0.0:
                raise DomainError(f"{name} must be > 0, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class RatePair:
    """Wiretap code rates: codeword rate ``rate_codeword`` >= secret rate ``rate_secret`` > 0."""

    rate_codeword: float
    rate_secret: float

    def __post_init__(self):
        rb = _finite(self.rate_codeword, "rate_codeword")
        rs = _finite(self.rate_secret, "rate_secret")
        if rs <= 0.0:
            raise DomainError(f"rate_secret must be > 0, got {rs}")
        if rb < rs:
            raise DomainError(f"rate_codeword ({rb}) must be >= rate_secret ({rs})")
        object.__setattr__(self, "rate_codeword", rb)
        object.__setattr__(self, "rate_secret", rs)


def check_metric_rates(rates):
    """Reject rate pairs whose secret rate is too small for the averaged metrics."""
    if rates.rate_secret < MIN_RATE_SECRET:
        raise DomainError(
            f"rate_secret must be >= {MIN_RATE_SECRET:g} for averaged metrics, "
            f"got {rates.rate_secret}"
        )


def capacity(snr):
    """Instantaneous capacity ``log2(1 + snr)``."""
    snr = _finite(snr, "snr")
    if snr < 0.0:
        raise DomainError(f"snr must be >= 0, got {snr}")
    return math.log1p(snr) / math.log(2.0)


def fractional_equivocation(snr_eve, rates):
    """Maximum achievable fractional equivocation for one fading realization.

    Piecewise in Eve's SNR: 1 up to ``2**(Rb - Rs) - 1``, then
    ``(Rb - log2(1 + snr_eve)) / Rs``, then 0 from ``2**Rb - 1`` on. The
    middle expression clipped to [0, 1] is exactly that piecewise function.

    Accepts a scalar or a numpy array of SNRs.
    """
    scalar = np.ndim(snr_eve) == 0
    snr = np.asarray(snr_eve, dtype=float)
    if not np.all(np.isfinite(snr)) or np.any(snr < 0.0):
        raise DomainError("snr_eve must be finite and >= 0")
    cap = np.log1p(snr) / math.log(2.0)
    delta = np.clip((rates.rate_codeword - cap) / rates.rate_secret, 0.0, 1.0)
    return float(delta) if scalar else delta


def transmit_probability(stats, rates):
    """Probability that on-off feedback lets Alice transmit, ``P(Rb <= Cb)``."""
    return math.exp(-math.expm1(rates.rate_codeword * math.log(2.0)) / stats.avg_snr_bob)


def pe_lower_bound(delta, message_set_size_log2=INFINITE):
    """Fano-based lower bound on Eve's decoding error probability.

    ``max(0, delta - 1/log2(K))``; with ``K`` infinite (the default) this is
    ``delta`` itself.
    """
    delta = _finite(delta, "delta")
    if not 0.0 <= delta <= 1.0:
        raise DomainError(f"delta must lie in [0, 1], got {delta}")
    log_k = float(message_set_size_log2)
    if math.isnan(log_k) or log_k <= 0.0:
        raise DomainError(f"log2(K) must be > 0, got {message_set_size_log2}")
    if math.isinf(log_k):
        return delta
    return max(0.0, delta - 1.0 / log_k)
