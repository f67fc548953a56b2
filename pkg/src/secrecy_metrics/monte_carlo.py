"""Seeded Monte Carlo oracle for the quasi-static Rayleigh wiretap channel.

Random numbers come from numpy's Philox4x64 counter-based generator. The
sample index space is cut into fixed blocks of ``BLOCK_SIZE`` draws and block
``k`` of stream ``stream_id`` is keyed by ``SeedSequence(seed,
spawn_key=(stream_id, k))``. Block contents therefore depend only on
``(seed, stream_id, k)``, and per-block statistics are merged in block order,
so estimates are bit-identical for any number of worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel_model import check_metric_rates, fractional_equivocation
from .errors import DomainError
from .metrics import check_theta

BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class McConfig:
    seed: int = 0
    n_samples: int = 1_000_000
    stream_id: int = 0

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise DomainError(f"n_samples must be a positive integer, got {self.n_samples}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if int(self.stream_id) != self.stream_id or self.stream_id < 0:
            raise DomainError(f"stream_id must be >= 0, got {self.stream_id}")

    def with_stream(self, stream_id):
        return McConfig(self.seed, self.n_samples, stream_id)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int
    proportion: bool = False

    def z_score(self, expected):
        """Deviation of the estimate from ``expected`` in standard errors.

        A proportion whose samples were all 0 or all 1 has zero sample
        variance; its spread is then taken from the Bernoulli variance at
        ``expected`` (a score test), since a zero-width band would demand
        exact equality for any probability below 1/n.
        """
        diff = self.mean - expected
        se = self.std_error
        if se == 0.0 and self.proportion and 0.0 <= expected <= 1.0:
            se = math.sqrt(expected * (1.0 - expected) / self.n)
        if se == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / se

    def agrees_with(self, expected, n_sigma=4.0):
        return abs(self.z_score(expected)) <= n_sigma


def _block_sizes(n):
    full, rest = divmod(n, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def _exponential_block(mean, config, index, size):
    seq = np.random.SeedSequence(config.seed, spawn_key=(config.stream_id, index))
    rng = np.random.Generator(np.random.Philox(seq))
    # random() is on [0, 1); 1 - u is on (0, 1] so the log is finite.
    u = 1.0 - rng.random(size)
    return -mean * np.log(u)


def _check_mean(mean):
    mean = float(mean)
    if not math.isfinite(mean) or mean <= 0.0:
        raise DomainError(f"exponential mean must be finite and > 0, got {mean}")
    return mean


def sample_exponential(mean, config):
    """Draw ``config.n_samples`` i.i.d. exponential SNRs with the given mean."""
    mean = _check_mean(mean)
    sizes = _block_sizes(config.n_samples)
    return np.concatenate(
        [_exponential_block(mean, config, k, size) for k, size in enumerate(sizes)]
    )


def _estimate(mean, config, transform, workers=None, proportion=False):
    """Sample mean and standard error of ``transform(samples)``.

    Blocks may be processed concurrently; (count, mean, M2) triples are
    merged in block order with Chan's update so the result is independent
    of scheduling.
    """
    mean = _check_mean(mean)
    sizes = _block_sizes(config.n_samples)

    def block_stats(args):
        k, size = args
        values = np.asarray(transform(_exponential_block(mean, config, k, size)), dtype=float)
        m = float(values.mean())
        return size, m, float(np.sum((values - m) ** 2))

    jobs = list(enumerate(sizes))
    if workers and workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(block_stats, jobs))
    else:
        parts = [block_stats(job) for job in jobs]

    n, avg, m2 = parts[0]
    for nb, mb, m2b in parts[1:]:
        total = n + nb
        delta = mb - avg
        avg += delta * nb / total
        m2 += m2b + delta * delta * n * nb / total
        n = total
    std = math.sqrt(m2 / (n - 1)) if n > 1 else 0.0
    return McEstimate(mean=avg, std_error=std / math.sqrt(n), n=n, proportion=proportion)


def estimate_outage(stats, rates, theta, config, workers=None):
    """Fraction of Eve realizations whose fractional equivocation falls below ``theta``."""
    theta = check_theta(theta)
    return _estimate(
        stats.avg_snr_eve,
        config,
        lambda snr: fractional_equivocation(snr, rates) < theta,
        workers,
        proportion=True,
    )


def estimate_avg_equivocation(stats, rates, config, workers=None):
    check_metric_rates(rates)
    return _estimate(
        stats.avg_snr_eve, config, lambda snr: fractional_equivocation(snr, rates), workers
    )


def estimate_leakage_rate(stats, rates, config, workers=None):
    check_metric_rates(rates)
    rs = rates.rate_secret
    return _estimate(
        stats.avg_snr_eve,
        config,
        lambda snr: (1.0 - fractional_equivocation(snr, rates)) * rs,
        workers,
    )


def estimate_ptx(stats, rates, config, workers=None):
    """Fraction of Bob realizations with ``log2(1 + snr_b) >= Rb``."""
    rb = rates.rate_codeword
    return _estimate(
        stats.avg_snr_bob,
        config,
        lambda snr: np.log1p(snr) / math.log(2.0) >= rb,
        workers,
        proportion=True,
    )
