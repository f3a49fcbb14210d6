"""Numerically robust special functions shared by every test.

Thin, strictly-checked wrappers around SciPy's vetted implementations
(Cephes under the hood: series expansion for small x, continued fraction
in the tail).  All p-value producers in this package go through
:func:`as_probability`, which rejects out-of-range values instead of
clamping them.
"""

import math

from scipy import special as _sp

from .errors import DomainError, NonFiniteInput

__all__ = [
    "erfc",
    "erfc_inv",
    "lower_igamc",
    "upper_igamc",
    "normal_cdf",
    "as_probability",
]

# Accumulated float roundoff in sums of CDF terms; anything farther outside
# [0, 1] than this is treated as a bug, not noise.
_P_SLACK = 1e-12


def erfc(z: float) -> float:
    """Complementary error function (2/sqrt(pi)) * integral of exp(-u^2) from z."""
    z = float(z)
    if not math.isfinite(z):
        raise NonFiniteInput(f"erfc requires a finite argument, got {z!r}")
    return float(_sp.erfc(z))


def erfc_inv(p: float) -> float:
    """Inverse of :func:`erfc` on (0, 2)."""
    p = float(p)
    if not math.isfinite(p):
        raise NonFiniteInput(f"erfc_inv requires a finite argument, got {p!r}")
    if not 0.0 < p < 2.0:
        raise DomainError(f"erfc_inv is defined on (0, 2), got {p!r}")
    return float(_sp.erfcinv(p))


def lower_igamc(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) in [0, 1].

    Increasing in x with P(a, 0) = 0.  The upper companion
    :func:`upper_igamc` should be preferred when the interesting mass sits
    in the tail, to avoid cancellation in ``1 - P``.
    """
    a, x = float(a), float(x)
    if math.isnan(a) or math.isnan(x) or math.isinf(a):
        raise DomainError(f"lower_igamc requires finite a and non-NaN x, got a={a!r}, x={x!r}")
    if a <= 0.0:
        raise DomainError(f"lower_igamc requires a > 0, got a={a!r}")
    if x < 0.0:
        raise DomainError(f"lower_igamc requires x >= 0, got x={x!r}")
    return float(_sp.gammainc(a, x))


def upper_igamc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    a, x = float(a), float(x)
    if math.isnan(a) or math.isnan(x) or math.isinf(a):
        raise DomainError(f"upper_igamc requires finite a and non-NaN x, got a={a!r}, x={x!r}")
    if a <= 0.0:
        raise DomainError(f"upper_igamc requires a > 0, got a={a!r}")
    if x < 0.0:
        raise DomainError(f"upper_igamc requires x >= 0, got x={x!r}")
    return float(_sp.gammaincc(a, x))


def normal_cdf(x: float) -> float:
    """Standard normal CDF, accurate in both tails."""
    x = float(x)
    if not math.isfinite(x):
        raise NonFiniteInput(f"normal_cdf requires a finite argument, got {x!r}")
    return float(_sp.ndtr(x))


def as_probability(value: float, *, what: str = "p-value") -> float:
    """Validate that ``value`` is a probability in [0, 1] and return it.

    Values within float-roundoff slack of the interval are snapped onto it;
    anything farther outside raises, because a p-value outside [0, 1] means
    a formula was implemented wrong, and clamping would hide that.
    """
    value = float(value)
    if math.isnan(value):
        raise DomainError(f"{what} is NaN")
    if value < 0.0:
        if value >= -_P_SLACK:
            return 0.0
        raise DomainError(f"{what} out of range: {value!r} < 0")
    if value > 1.0:
        if value <= 1.0 + _P_SLACK:
            return 1.0
        raise DomainError(f"{what} out of range: {value!r} > 1")
    return value
