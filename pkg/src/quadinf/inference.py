"""One-sample tests, confidence intervals and confidence regions.

Every test returns an :class:`InferenceResult`. Two-sided p-values are
``2 Phi(-|z|)``; where the natural alternative is one-sided the matching
one-sided p-value is reported too.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import estimators as est
from .errors import DegenerateVarianceError, DimensionError, DomainError
from .linalg import Dataset, ModelFit, quad_form_inv
from .normal import normal_cdf, normal_quantile

FLAG_FLOORED = "variance-floored"
FLAG_CLAMPED = "clamped-interval"


@dataclass(frozen=True)
class InferenceResult:
    """Outcome of a single test / interval computation.

    ``ci_low``/``ci_high`` are the reported (possibly clamped) interval;
    ``raw_ci`` keeps the symmetric interval before clamping.
    """

    name: str
    estimate: float
    std_error: float
    z: float
    p_value: float
    ci_low: float
    ci_high: float
    alpha: float
    null: float | None = None
    p_value_one_sided: float | None = None
    raw_ci: tuple | None = None
    flags: tuple = ()
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["raw_ci"] = list(self.raw_ci) if self.raw_ci is not None else None
        d["flags"] = list(self.flags)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "InferenceResult":
        d = dict(d)
        if d.get("raw_ci") is not None:
            d["raw_ci"] = tuple(d["raw_ci"])
        d["flags"] = tuple(d.get("flags", ()))
        return cls(**d)

    @property
    def ci_length(self) -> float:
        return self.ci_high - self.ci_low


def two_sided_p(z: float) -> float:
    return min(1.0, 2.0 * normal_cdf(-abs(z)))


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")


def _clamp(v, lo, hi):
    if lo is not None and v < lo:
        return lo
    if hi is not None and v > hi:
        return hi
    return v


def _result(name, estimate, se, null, alpha, *, flags=(), clamp=None, one_sided=None,
            details=None):
    """Assemble a result with z = (estimate - null)/se and a symmetric CI."""
    _check_alpha(alpha)
    if not se > 0.0 or not math.isfinite(se):
        raise DegenerateVarianceError(f"{name}: standard error is zero or not finite")
    z = (estimate - null) / se
    half = normal_quantile(1.0 - alpha / 2.0) * se
    lo, hi = estimate - half, estimate + half
    raw = (lo, hi)
    flags = list(flags)
    if clamp is not None:
        lo2, hi2 = _clamp(lo, *clamp), _clamp(hi, *clamp)
        if (lo2, hi2) != (lo, hi):
            flags.append(FLAG_CLAMPED)
        lo, hi = lo2, hi2
    p1 = None
    if one_sided == "upper":
        p1 = 1.0 - normal_cdf(z)
    elif one_sided == "lower":
        p1 = normal_cdf(z)
    return InferenceResult(name=name, estimate=float(estimate), std_error=float(se), z=float(z),
                           p_value=two_sided_p(z), ci_low=float(lo), ci_high=float(hi),
                           alpha=alpha, null=None if null is None else float(null),
                           p_value_one_sided=p1, raw_ci=raw, flags=tuple(flags),
                           details=details or {})


def _floored(raw, fit, name):
    if fit.sigma2_hat <= 0.0:
        raise DegenerateVarianceError(f"{name}: residual variance is zero (noiseless fit)")
    value, floored = est.floor_variance(raw, fit.sigma2_hat, fit.n)
    return value, (FLAG_FLOORED,) if floored else ()


def test_quad_norm(fit: ModelFit, c0: float, alpha: float = 0.05) -> InferenceResult:
    """Test ||beta||_2 = c0 with the bias- and variance-corrected statistic."""
    if c0 < 0:
        raise DomainError("c0 must be non-negative")
    var, flags = _floored(est.zeta_n2_hat(fit, raw=True), fit, "quad-norm")
    return _result("quad-norm", est.quad_norm_estimate(fit), math.sqrt(var), c0 * c0, alpha,
                   flags=flags)


def test_conventional(fit: ModelFit, c0: float, alpha: float = 0.05) -> InferenceResult:
    """Classical Z-test of ||beta||_2 = c0 based on ||beta_hat||^2."""
    if c0 < 0:
        raise DomainError("c0 must be non-negative")
    var = est.zeta0_2_hat(fit)
    b = fit.beta_hat
    return _result("conventional", float(b @ b), math.sqrt(var), c0 * c0, alpha)


def test_signal_detection(fit: ModelFit, alpha: float = 0.05) -> InferenceResult:
    """Test beta = 0 using the null variance; one-sided p for ||beta||^2 > 0."""
    var, flags = _floored(est.zeta_star2_hat(fit, raw=True), fit, "signal")
    return _result("signal", est.quad_norm_estimate(fit), math.sqrt(var), 0.0, alpha,
                   flags=flags, one_sided="upper")


def global_statistic_numerator(fit: ModelFit, beta_null) -> float:
    beta_null = np.asarray(beta_null, dtype=float)
    if beta_null.shape != (fit.p,):
        raise DimensionError(f"beta_null must have length p={fit.p}")
    d = fit.beta_hat - beta_null
    return float(d @ d) - fit.trace_inv[0] * fit.sigma2_hat


def test_global(fit: ModelFit, beta_null, alpha: float = 0.05) -> InferenceResult:
    """Test beta = beta_null via a bias-corrected ||beta_hat - beta_null||^2."""
    num = global_statistic_numerator(fit, beta_null)
    var, flags = _floored(est.zeta_star2_hat(fit, raw=True), fit, "global")
    return _result("global", num, math.sqrt(var), 0.0, alpha, flags=flags, one_sided="upper")


def confidence_region_contains(fit: ModelFit, beta, alpha: float = 0.05,
                               side: str = "two") -> bool:
    """Whether ``beta`` lies in the one- or two-sided confidence region."""
    _check_alpha(alpha)
    num = global_statistic_numerator(fit, beta)
    zeta = math.sqrt(est.zeta_star2_hat(fit))
    if side == "two":
        return abs(num) <= normal_quantile(1.0 - alpha / 2.0) * zeta
    if side == "one":
        return num <= normal_quantile(1.0 - alpha) * zeta
    raise DomainError("side must be 'one' or 'two'")


def test_error_variance(fit: ModelFit, sigma2_null: float, alpha: float = 0.05,
                        residuals=None) -> InferenceResult:
    """Test sigma_eps^2 = sigma2_null with the dimension-adjusted variance."""
    if not sigma2_null > 0:
        raise DomainError("sigma2_null must be positive")
    if fit.sigma2_hat <= 0.0:
        raise DegenerateVarianceError("error-variance: residual variance is zero")
    nu4, nu_floored = est.nu4_floor(est.nu4_hat(fit, residuals, raw=True), fit.sigma2_hat)
    var, flags = _floored(est.zeta_eps2_hat(fit, nu4, raw=True), fit, "error-variance")
    if nu_floored:
        flags = tuple(set(flags) | {FLAG_FLOORED})
    return _result("error-variance", fit.sigma2_hat, math.sqrt(var), sigma2_null, alpha,
                   flags=flags, clamp=(0.0, None), details={"nu4_hat": nu4})


def test_rho(fit: ModelFit, dataset: Dataset, rho_null: float, alpha: float = 0.05,
             conventional: bool = False) -> InferenceResult:
    """Test the fraction of variance explained; one-sided p is for rho < rho_null."""
    if not 0.0 < rho_null < 1.0:
        raise DomainError("rho_null must lie in (0, 1)")
    if conventional:
        rho, var_raw = est.conventional_rho(fit, dataset)
        var, floored = est.floor_variance(var_raw, fit.sigma2_hat, fit.n)
        return _result("rho-conventional", rho, math.sqrt(var), rho_null, alpha,
                       flags=(FLAG_FLOORED,) if floored else (), clamp=(0.0, 1.0),
                       one_sided="lower")
    snr = est.snr_estimates(fit, dataset)
    flags = (FLAG_FLOORED,) if snr.floored else ()
    return _result("rho", snr.rho_hat, math.sqrt(snr.sigma2_rho), rho_null, alpha, flags=flags,
                   clamp=(0.0, 1.0), one_sided="lower",
                   details={"eta_hat": snr.eta_hat, "nu4_hat": snr.nu4_hat})


def ci_eta(fit: ModelFit, dataset: Dataset, alpha: float = 0.05,
           eta_null: float = 0.0) -> InferenceResult:
    """Interval for the signal strength beta^T Sigma beta."""
    snr = est.snr_estimates(fit, dataset)
    flags = (FLAG_FLOORED,) if "sigma2_eta" in snr.floored or "nu4" in snr.floored else ()
    return _result("eta", snr.eta_hat, math.sqrt(snr.sigma2_eta), eta_null, alpha, flags=flags)


def linear_functional_inference(fit: ModelFit, c, alpha: float = 0.05,
                                null: float = 0.0) -> InferenceResult:
    """Inference on c^T beta with variance sigma2_hat c^T (X^T X)^{-1} c."""
    c = np.asarray(c, dtype=float)
    if c.shape != (fit.p,):
        raise DimensionError(f"c must have length p={fit.p}")
    var = fit.sigma2_hat * quad_form_inv(fit, c)
    return _result("linear", float(c @ fit.beta_hat), math.sqrt(max(var, 0.0)), null, alpha)


def asymptotic_power(effect: float, std_error: float, alpha: float = 0.05) -> float:
    """Two-sided power at a shift ``effect`` in the estimated quantity."""
    _check_alpha(alpha)
    q = normal_quantile(1.0 - alpha / 2.0)
    s = effect / std_error
    return 1.0 - normal_cdf(-s + q) + normal_cdf(-s - q)


# keep pytest from collecting these when imported into test modules
for _f in (test_quad_norm, test_conventional, test_signal_detection, test_global, test_error_variance, test_rho):
    _f.__test__ = False
del _f
