"""Two independent regressions sharing the coefficient dimension.

Model A is ``Y = X beta + eps`` with ``n`` rows, model B is
``W = V gamma + delta`` with ``n'`` rows; ``n`` and ``n'`` may differ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import estimators as est
from .errors import DegenerateDenominatorError, DimensionError, DomainError
from .inference import FLAG_FLOORED, InferenceResult, _result
from .linalg import ModelFit, cross_trace, quad_form_inv


@dataclass(frozen=True)
class TwoSampleFit:
    fit_a: ModelFit
    fit_b: ModelFit
    cross_trace: float


def two_sample_fit(fit_a: ModelFit, fit_b: ModelFit) -> TwoSampleFit:
    if fit_a.p != fit_b.p:
        raise DimensionError(f"fits disagree on p: {fit_a.p} vs {fit_b.p}")
    return TwoSampleFit(fit_a, fit_b, cross_trace(fit_a, fit_b))


def _null_spread(fit: ModelFit) -> float:
    # -tr(G^{-2}) + tr(G^{-1})^2 / (n - p)
    t1, t2, _ = fit.trace_inv
    return -t2 + t1 * t1 / (fit.n - fit.p)


def diff_norm_estimate(ts: TwoSampleFit) -> float:
    """Bias-corrected ||beta - gamma||^2."""
    a, b = ts.fit_a, ts.fit_b
    d = a.beta_hat - b.beta_hat
    # grouped so swapping the slots gives the identical float
    return float(d @ d) - (a.trace_inv[0] * a.sigma2_hat + b.trace_inv[0] * b.sigma2_hat)


def sigma2_diff_hat(ts: TwoSampleFit, raw: bool = False) -> float:
    """Plug-in variance of :func:`diff_norm_estimate`.

    The quadratic forms in ``beta_hat - gamma_hat`` carry noise from both
    fits, so the squared-trace and cross-trace terms enter with negative
    signs to offset it.
    """
    a, b = ts.fit_a, ts.fit_b
    sa, sb = a.sigma2_hat, b.sigma2_hat
    d = a.beta_hat - b.beta_hat
    value = (2.0 * sa * sa * _null_spread(a)
             + 2.0 * sb * sb * _null_spread(b)
             - 4.0 * sa * sb * ts.cross_trace
             + 4.0 * sa * quad_form_inv(a, d)
             + 4.0 * sb * quad_form_inv(b, d))
    if raw:
        return value
    return est.floor_variance(value, max(sa, sb), min(a.n, b.n))[0]


def test_equality(ts: TwoSampleFit, alpha: float = 0.05) -> InferenceResult:
    """Test beta = gamma; the one-sided p-value is for ||beta - gamma|| > 0."""
    raw = sigma2_diff_hat(ts, raw=True)
    var, floored = est.floor_variance(raw, max(ts.fit_a.sigma2_hat, ts.fit_b.sigma2_hat),
                                      min(ts.fit_a.n, ts.fit_b.n))
    return _result("two-sample-equality", diff_norm_estimate(ts), math.sqrt(var), 0.0, alpha,
                   flags=(FLAG_FLOORED,) if floored else (), one_sided="upper")


def _corrected_norms(ts: TwoSampleFit):
    nb = est.quad_norm_estimate(ts.fit_a)
    ng = est.quad_norm_estimate(ts.fit_b)
    if not (nb > 0.0 and ng > 0.0):
        raise DegenerateDenominatorError(
            "bias-corrected squared norms must both be positive to form theta_hat "
            f"(got {nb:.4g} and {ng:.4g})")
    return nb, ng


def theta_hat(ts: TwoSampleFit) -> float:
    """gamma_hat^T beta_hat over the product of bias-corrected norms (unclamped)."""
    nb, ng = _corrected_norms(ts)
    return float(ts.fit_b.beta_hat @ ts.fit_a.beta_hat) / math.sqrt(nb * ng)


def sigma2_theta_hat(ts: TwoSampleFit, raw: bool = False) -> float:
    """Plug-in variance of :func:`theta_hat`."""
    a, b = ts.fit_a, ts.fit_b
    sa, sb = a.sigma2_hat, b.sigma2_hat
    nb, ng = _corrected_norms(ts)
    bh, gh = a.beta_hat, b.beta_hat
    inner = float(gh @ bh)
    # components of each estimate orthogonal to the other one
    u = bh - gh * inner / ng
    v = gh - bh * inner / nb
    value = ((-sa * sb * ts.cross_trace
              + sb * quad_form_inv(b, u)
              + sa * quad_form_inv(a, v)) / (nb * ng)
             + inner ** 2 / (4.0 * nb * ng ** 3) * 2.0 * sb * sb * _null_spread(b)
             + inner ** 2 / (4.0 * nb ** 3 * ng) * 2.0 * sa * sa * _null_spread(a))
    if raw:
        return value
    return est.floor_variance(value, max(sa, sb), min(a.n, b.n))[0]


def conventional_theta(ts: TwoSampleFit):
    """Uncorrected cosine and its large-SNR variance ``(theta_tilde, var)``."""
    a, b = ts.fit_a, ts.fit_b
    bh, gh = a.beta_hat, b.beta_hat
    nb, ng = float(bh @ bh), float(gh @ gh)
    if not (nb > 0.0 and ng > 0.0):
        raise DegenerateDenominatorError("coefficient estimates must be non-zero")
    inner = float(gh @ bh)
    u = bh - gh * inner / ng
    v = gh - bh * inner / nb
    var = (b.sigma2_hat * quad_form_inv(b, u) + a.sigma2_hat * quad_form_inv(a, v)) / (nb * ng)
    return inner / math.sqrt(nb * ng), var


def test_coheritability(ts: TwoSampleFit, theta_null: float, alpha: float = 0.05,
                        conventional: bool = False) -> InferenceResult:
    """Test the normalized inner product of the two coefficient vectors."""
    if not -1.0 < theta_null < 1.0:
        raise DomainError("theta_null must lie in (-1, 1)")
    sigma2 = max(ts.fit_a.sigma2_hat, ts.fit_b.sigma2_hat)
    n = min(ts.fit_a.n, ts.fit_b.n)
    if conventional:
        theta, raw = conventional_theta(ts)
        name = "coheritability-conventional"
    else:
        theta, raw = theta_hat(ts), sigma2_theta_hat(ts, raw=True)
        name = "coheritability"
    var, floored = est.floor_variance(raw, sigma2, n)
    return _result(name, theta, math.sqrt(var), theta_null, alpha,
                   flags=(FLAG_FLOORED,) if floored else (), clamp=(-1.0, 1.0))


for _f in (test_equality, test_coheritability):
    _f.__test__ = False
del _f
