"""Secrecy metrics and rate design for quasi-static Rayleigh wiretap channels."""

from .channel_model import (
    ChannelStats,
    RatePair,
    capacity,
    fractional_equivocation,
    pe_lower_bound,
    transmit_probability,
)
from .errors import DomainError, InfeasibleError
from .metrics import (
    SecrecyReport,
    avg_equivocation,
    full_report,
    leakage_rate,
    outage_probability,
    throughput,
)
from .monte_carlo import McConfig, McEstimate
from .rate_optimizer import (
    DesignProblem,
    DesignSolution,
    FeasibleRsInterval,
    brute_force_optimize,
    feasible_interval,
    max_throughput,
    optimize,
    optimize_equivocation,
    optimize_leakage,
    optimize_outage,
)
from .special_functions import exp_integral_ei, lambert_w0

__version__ = "0.1.0"
