"""Tail probabilities for the chi-square and standard normal distributions.

The chi-square survival function is computed from the regularized
incomplete gamma function, evaluated by a power series in the left
regime and a Lentz continued fraction in the right regime.  The switch
between the two is fixed at ``x < df + 1`` so that independent ports of
this module agree to full precision.  Accuracy is better than 1e-10
absolute for df up to 200 and x up to 1000.
"""

from __future__ import annotations

import math

from .errors import DomainError

__all__ = ["chi_square_sf", "chi_square_quantile", "standard_normal_sf"]

_EPS = 1e-16
_FPMIN = 1e-300
_MAX_ITER = 10_000


def _lower_regularized_series(a: float, x: float) -> float:
    """P(a, x) by the ascending power series; converges best for x < a + 1."""
    if x == 0.0:
        return 0.0
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))

def _upper_regularized_cf(a: float, x: float) -> float:
    """Q(a, x) by the modified Lentz continued fraction; for x >= a + 1."""
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def chi_square_sf(x: float, df: int) -> float:
    """Upper-tail probability P(X > x) for X ~ chi-square with df degrees.

    Series branch below x = df + 1, continued fraction at or above it.
    """
    if x < 0:
        raise DomainError(f"chi-square statistic must be nonnegative, got {x!r}")
    if df < 1 or df != int(df):
        raise DomainError(f"degrees of freedom must be a positive integer, got {df!r}")
    if x == 0.0:
        return 1.0
    a = df / 2.0
    t = x / 2.0
    if x < df + 1.0:
        return 1.0 - _lower_regularized_series(a, t)
    return _upper_regularized_cf(a, t)


def chi_square_quantile(alpha: float, df: int) -> float:
    """The x with chi_square_sf(x, df) = alpha, by bracketing and bisection."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie strictly between 0 and 1, got {alpha!r}")
    if df < 1 or df != int(df):
        raise DomainError(f"degrees of freedom must be a positive integer, got {df!r}")
    lo, hi = 0.0, float(max(df, 1))
    while chi_square_sf(hi, df) > alpha:
        hi *= 2.0
        if hi > 1e8:  # alpha this small is out of any practical range
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if chi_square_sf(mid, df) > alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def standard_normal_sf(z: float) -> float:
    """Upper-tail probability P(Z > z) for a standard normal variate."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))
