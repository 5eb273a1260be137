"""One-sample Kolmogorov-Smirnov test against Unif[0, 1]."""

from __future__ import annotations

import math

import numpy as np

from ..errors import DimensionError, DomainError

_TERM_TOL = 1e-12


def kolmogorov_q(lam: float) -> float:
    """Tail probability Q(lam) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lam^2).

    The alternating series converges slowly for small ``lam``; there the
    equivalent theta-function form is summed instead.
    """
    if lam <= 0.0:
        return 1.0
    if lam < 1.0:
        s = 0.0
        k = 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * math.pi ** 2 / (8.0 * lam * lam))
            s += term
            if term < _TERM_TOL:
                break
            k += 1
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * s))
    s = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        s += term if k % 2 else -term
        if term < _TERM_TOL:
            break
        k += 1
    return min(1.0, max(0.0, 2.0 * s))


def ks_uniformity(p_values):
    """Return ``(D, p)`` for the hypothesis that ``p_values`` are Unif[0, 1].

    ``p`` uses the asymptotic distribution with the usual finite-sample
    factor sqrt(m) + 0.12 + 0.11/sqrt(m).
    """
    u = np.sort(np.asarray(p_values, dtype=float).ravel())
    m = u.size
    if m == 0:
        raise DimensionError("ks_uniformity needs at least one value")
    if np.any(~np.isfinite(u)) or u[0] < 0.0 or u[-1] > 1.0:
        raise DomainError("p-values must lie in [0, 1]")
    i = np.arange(1, m + 1)
    d = float(max(np.max(i / m - u), np.max(u - (i - 1) / m)))
    rm = math.sqrt(m)
    return d, kolmogorov_q((rm + 0.12 + 0.11 / rm) * d)
