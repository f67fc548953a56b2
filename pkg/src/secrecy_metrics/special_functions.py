"""Exponential integral and Lambert W, restricted to the real ranges we need.

Both are plain-float implementations with fixed tolerances:

* ``exp_integral_ei(x)`` for ``x < 0`` goes through ``E1(-x) = -Ei(x)``,
  using the power series below 1 and a Lentz-evaluated continued fraction
  above it.
* ``lambert_w0(x)`` for ``x >= 0`` runs Halley's iteration on ``w*e^w - x``.
"""

import math

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
_SERIES_CUTOFF = 1.0
_EPS = 1e-16
_TINY = 1e-300
_MAX_TERMS = 500


def _check_finite(x, name):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        try:
            x = float(x)
        except (TypeError, ValueError):
            raise DomainError(f"{name} must be a real number, got {x!r}") from None
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    return x


def _e1_series(z):
    # E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k * k!)
    total = 0.0
    term = 1.0
    for k in range(1, _MAX_TERMS):
        term *= -z / k
        contrib = term / k
        total += contrib
        if abs(contrib) < _EPS * abs(total):
            break
    return -EULER_GAMMA - math.log(z) - total


def _e1_scaled_cf(z):
    """e^z * E1(z) by modified Lentz on the continued fraction, z > 1."""
    b = z + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_TERMS):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def scaled_e1(z):
    """Return ``e^z * E1(z)`` for ``z > 0``.

    The scaling keeps the value O(1/z) for large arguments, so products
    like ``e^{c} * Ei(-z)`` can be formed as ``exp(c - z) * scaled_e1(z)``
    without overflow or premature underflow.
    """
    z = _check_finite(z, "z")
    if z <= 0.0:
        raise DomainError(f"scaled_e1 requires z > 0, got {z}")
    if z <= _SERIES_CUTOFF:
        return math.exp(z) * _e1_series(z)
    return _e1_scaled_cf(z)


def exp_integral_ei(x):
    """Exponential integral ``Ei(x) = integral of e^t/t over (-inf, x]`` for ``x < 0``.

    The result is negative and decreasing in ``x`` (it tends to 0 as
    ``x -> -inf`` and to ``-inf`` as ``x -> 0-``). For ``x`` below about
    -745 the true value is smaller than the least subnormal and 0.0 - i.e.
    ``-0.0`` - is returned.
    """
    x = _check_finite(x, "x")
    if x >= 0.0:
        raise DomainError(f"exp_integral_ei is defined here only for x < 0, got {x}")
    z = -x
    if z <= _SERIES_CUTOFF:
        return -_e1_series(z)
    return -math.exp(-z) * _e1_scaled_cf(z)


def lambert_w0(x):
    """Principal branch of the Lambert W function for ``x >= 0``."""
    x = _check_finite(x, "x")
    if x < 0.0:
        raise DomainError(f"lambert_w0 is defined here only for x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < math.e:
        w = math.log1p(x)
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) < 1e-15 * (1.0 + abs(w)):
            break
    return w
