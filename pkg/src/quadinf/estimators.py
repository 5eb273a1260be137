"""Point and variance estimators built on a :class:`~quadinf.linalg.ModelFit`.

Variance plug-ins are differences of positive terms and can come out
non-positive in finite samples. Each ``*_hat`` function takes ``raw=True``
to return the unmodified value; otherwise non-positive values are replaced
by a tiny positive floor. :func:`floor_variance` reports whether the floor
was applied so callers can carry a diagnostic flag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateScaleError
from .linalg import Dataset, ModelFit, quad_form_inv

ABSOLUTE_FLOOR = 1e-300
RELATIVE_FLOOR = 1e-12


def variance_floor(sigma2: float, n: int) -> float:
    if sigma2 > 0.0:
        return max(RELATIVE_FLOOR * sigma2 * sigma2 / n, ABSOLUTE_FLOOR)
    return ABSOLUTE_FLOOR


def floor_variance(raw: float, sigma2: float, n: int):
    """Return ``(value, floored)`` where non-positive ``raw`` is replaced."""
    if np.isfinite(raw) and raw > 0.0:
        return float(raw), False
    return variance_floor(sigma2, n), True


def quad_norm_estimate(fit: ModelFit) -> float:
    """Bias-corrected ||beta||^2: ||beta_hat||^2 - tr{(X^T X)^{-1}} sigma2_hat."""
    b = fit.beta_hat
    return float(b @ b) - fit.trace_inv[0] * fit.sigma2_hat


def _zeta_star2_raw(fit: ModelFit) -> float:
    s4 = fit.sigma2_hat ** 2
    t1, t2, _ = fit.trace_inv
    return 2.0 * s4 * t2 + 2.0 * s4 * t1 * t1 / (fit.n - fit.p)


def zeta0_2_hat(fit: ModelFit) -> float:
    """Conventional variance 4 sigma2_hat beta_hat^T (X^T X)^{-1} beta_hat."""
    return 4.0 * fit.sigma2_hat * quad_form_inv(fit, fit.beta_hat)


def zeta_n2_hat(fit: ModelFit, raw: bool = False) -> float:
    """Variance estimate for :func:`quad_norm_estimate`.

    4 s2 b^T G^{-1} b - 2 s2^2 tr(G^{-2}) + 2 s2^2 tr(G^{-1})^2 / (n - p),
    with ``G = X^T X``. The middle term removes the noise contribution
    that ``b^T G^{-1} b`` picks up from ``beta_hat``.
    """
    s4 = fit.sigma2_hat ** 2
    t1, t2, _ = fit.trace_inv
    value = zeta0_2_hat(fit) - 2.0 * s4 * t2 + 2.0 * s4 * t1 * t1 / (fit.n - fit.p)
    return value if raw else floor_variance(value, fit.sigma2_hat, fit.n)[0]


def zeta_star2_hat(fit: ModelFit, raw: bool = False) -> float:
    """Null (beta = 0) variance 2 s2^2 tr(G^{-2}) + 2 s2^2 tr(G^{-1})^2 / (n - p)."""
    value = _zeta_star2_raw(fit)
    return value if raw else floor_variance(value, fit.sigma2_hat, fit.n)[0]


def nu4_hat(fit: ModelFit, residuals=None, raw: bool = False) -> float:
    """Fourth error moment from rescaled residual fourth powers.

    The mean of e_i^4 over residuals is shrunk by the hat matrix; this
    undoes that shrinkage using the ratio p/n. The result is floored at
    sigma2_hat^2 (Jensen) unless ``raw``.
    """
    r = fit.residuals if residuals is None else np.asarray(residuals, dtype=float)
    n, p = fit.n, fit.p
    t = p / n
    s4 = fit.sigma2_hat ** 2
    m4 = float(np.mean(r ** 4))
    value = (m4 - 3.0 * s4 * t * (1.0 - t) ** 2 * (2.0 - t)) / (1.0 - t) ** 4
    if raw:
        return value
    return nu4_floor(value, fit.sigma2_hat)[0]


def nu4_floor(raw: float, sigma2: float):
    s4 = sigma2 * sigma2
    if sigma2 > 0.0 and np.isfinite(raw) and raw >= s4:
        return float(raw), False
    return s4, True


def zeta_eps2_hat(fit: ModelFit, nu4: float, raw: bool = False) -> float:
    """Variance of sigma2_hat: {nu4 + s2^2 (3t - 1)/(1 - t)} / n with t = p/n."""
    t = fit.p / fit.n
    value = (nu4 + fit.sigma2_hat ** 2 * (3.0 * t - 1.0) / (1.0 - t)) / fit.n
    return value if raw else floor_variance(value, fit.sigma2_hat, fit.n)[0]


@dataclass(frozen=True)
class VarianceEstimates:
    zeta_n2: float
    zeta_star2: float
    zeta0_2: float
    zeta_eps2: float
    nu4_hat: float
    floored: frozenset = frozenset()


def variance_estimates(fit: ModelFit) -> VarianceEstimates:
    """All one-sample variance estimates with floor flags collected."""
    floored = set()
    zn, f = floor_variance(zeta_n2_hat(fit, raw=True), fit.sigma2_hat, fit.n)
    if f:
        floored.add("zeta_n2")
    zs, f = floor_variance(zeta_star2_hat(fit, raw=True), fit.sigma2_hat, fit.n)
    if f:
        floored.add("zeta_star2")
    nu4, f = nu4_floor(nu4_hat(fit, raw=True), fit.sigma2_hat)
    if f:
        floored.add("nu4")
    ze, f = floor_variance(zeta_eps2_hat(fit, nu4, raw=True), fit.sigma2_hat, fit.n)
    if f:
        floored.add("zeta_eps2")
    return VarianceEstimates(zeta_n2=zn, zeta_star2=zs, zeta0_2=zeta0_2_hat(fit),
                             zeta_eps2=ze, nu4_hat=nu4, floored=frozenset(floored))


@dataclass(frozen=True)
class SnrEstimates:
    """Signal strength, variance-explained fraction and their variances."""

    eta_hat: float
    rho_hat: float
    sigma2_rho: float
    sigma2_eta: float
    mean_y4: float
    nu4_hat: float
    floored: frozenset = frozenset()


def explained_signal(fit: ModelFit) -> float:
    """beta_hat^T (X^T X / n) beta_hat (the uncorrected signal strength)."""
    b = fit.beta_hat
    return float(b @ fit.gram @ b) / fit.n


def snr_estimates(fit: ModelFit, dataset: Dataset) -> SnrEstimates:
    """Bias-corrected eta, rho and plug-in variances for both.

    ``eta_hat = b^T (X^T X/n) b - s2 p/n`` and ``rho_hat = eta_hat /
    (eta_hat + s2)``. The variance of ``rho_hat`` uses the delta-method
    formula with E(Y^4), eta, sigma^2, nu_4 and p/n replaced by sample
    counterparts; ``rho_hat`` itself is not clamped.
    """
    n, p = fit.n, fit.p
    t = p / n
    s2 = fit.sigma2_hat
    eta = explained_signal(fit) - s2 * t
    total = eta + s2
    if not total > 0.0:
        raise DegenerateScaleError("eta_hat + sigma2_hat must be positive")
    rho = eta / total
    my4 = float(np.mean(np.asarray(dataset.y, dtype=float) ** 4))
    floored = set()
    nu4, f = nu4_floor(nu4_hat(fit, raw=True), s2)
    if f:
        floored.add("nu4")

    s4, s6, s8 = s2 ** 2, s2 ** 3, s2 ** 4
    bracket = (2.0 * s8 * t / (1.0 - t)
               - (2.0 + 4.0 * t / (t - 1.0)) * s6 * eta
               + s4 * (my4 - nu4 + eta * eta * (4.0 * t - 2.0) / (1.0 - t))
               + eta * eta * nu4)
    var_rho, f = floor_variance(bracket / (n * total ** 4), s2, n)
    if f:
        floored.add("sigma2_rho")
    var_eta_raw = (my4 - nu4 - 2.0 * s2 * eta - eta * eta + 2.0 * s4 * p / (n - p)) / n
    var_eta, f = floor_variance(var_eta_raw, s2, n)
    if f:
        floored.add("sigma2_eta")
    return SnrEstimates(eta_hat=eta, rho_hat=rho, sigma2_rho=var_rho, sigma2_eta=var_eta,
                        mean_y4=my4, nu4_hat=nu4, floored=frozenset(floored))


def conventional_rho(fit: ModelFit, dataset: Dataset):
    """Uncorrected ratio and its large-SNR variance estimate.

    Returns ``(rho_tilde, var_raw)`` where ``var_raw`` may be non-positive.
    """
    n = fit.n
    s2 = fit.sigma2_hat
    eta = explained_signal(fit)
    total = eta + s2
    if not total > 0.0:
        raise DegenerateScaleError("signal plus noise estimate must be positive")
    my4 = float(np.mean(np.asarray(dataset.y, dtype=float) ** 4))
    me4 = float(np.mean(fit.residuals ** 4))
    bracket = (s2 ** 2 * (my4 - me4) - 2.0 * s2 ** 3 * eta
               + eta * eta * (me4 - 2.0 * s2 ** 2))
    return eta / total, bracket / (n * total ** 4)
