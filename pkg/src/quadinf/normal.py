"""Standard normal distribution function and its inverse.

``normal_cdf`` goes through the complementary error function so the lower
tail keeps full relative precision. ``normal_quantile`` starts from Acklam's
rational approximation (relative error about 1.15e-9) and applies one
Halley step against ``normal_cdf``, which brings it to machine precision.
Both accept scalars or arrays.
"""

import math

import numpy as np
from scipy import special

from .errors import DomainError

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)

_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _unwrap(out, scalar):
    return float(out) if scalar else out


def normal_cdf(z):
    """Phi(z) = P(N(0,1) <= z)."""
    scalar = np.ndim(z) == 0
    out = 0.5 * special.erfc(-np.asarray(z, dtype=float) / _SQRT2)
    return _unwrap(out, scalar)


def _acklam_lower(r):
    # r in (0, 0.5]; returns an approximation of Phi^{-1}(r) <= 0
    x = np.empty_like(r)
    tail = r < _P_LOW
    if np.any(tail):
        q = np.sqrt(-2.0 * np.log(r[tail]))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x[tail] = num / den
    mid = ~tail
    if np.any(mid):
        q = r[mid] - 0.5
        s = q * q
        num = (((((_A[0] * s + _A[1]) * s + _A[2]) * s + _A[3]) * s + _A[4]) * s + _A[5]) * q
        den = ((((_B[0] * s + _B[1]) * s + _B[2]) * s + _B[3]) * s + _B[4]) * s + 1.0
        x[mid] = num / den
    return x


def normal_quantile(q):
    """Phi^{-1}(q) for q strictly inside (0, 1).

    Raises
    ------
    DomainError
        If any entry is outside the open unit interval (or NaN).
    """
    scalar = np.ndim(q) == 0
    q = np.asarray(q, dtype=float)
    if not np.all((q > 0.0) & (q < 1.0)):
        raise DomainError("normal_quantile requires 0 < q < 1")
    flat = q.ravel()
    upper = flat > 0.5
    # 1 - q is exact for q >= 0.5, so the lower tail carries all the work
    r = np.where(upper, 1.0 - flat, flat)
    x = _acklam_lower(r)
    e = 0.5 * special.erfc(-x / _SQRT2) - r
    u = e * _SQRT2PI * np.exp(0.5 * x * x)
    x = x - u / (1.0 + 0.5 * x * u)
    x = np.where(upper, -x, x).reshape(q.shape)
    return _unwrap(x, scalar)
