import math

import numpy as np
import pytest

from helpers import dense_inverse, diag_fit, random_problem
from quadinf import estimators as est
from quadinf import inference as inf
from quadinf.errors import DegenerateVarianceError, DimensionError, DomainError
from quadinf.linalg import Dataset, center_dataset, ols_fit
from quadinf.normal import normal_cdf, normal_quantile


@pytest.fixture
def problem():
    rng = np.random.default_rng(42)
    d = center_dataset(random_problem(rng, 80, 15))
    return d, ols_fit(d)


def _check_shape(res, alpha=0.05):
    assert 0.0 <= res.p_value <= 1.0
    assert res.p_value == pytest.approx(2 * normal_cdf(-abs(res.z)), abs=1e-12)
    lo, hi = res.raw_ci
    assert hi - lo == pytest.approx(2 * normal_quantile(1 - alpha / 2) * res.std_error, rel=1e-12)
    assert res.ci_low <= res.ci_high


def test_quad_norm_at_estimate(problem):
    d, fit = problem
    e = est.quad_norm_estimate(fit)
    res = inf.test_quad_norm(fit, math.sqrt(e))
    assert res.z == pytest.approx(0.0, abs=1e-12) and res.p_value == pytest.approx(1.0)
    _check_shape(res)


def test_quad_norm_formula(problem):
    d, fit = problem
    res = inf.test_quad_norm(fit, 0.7, alpha=0.1)
    want = (est.quad_norm_estimate(fit) - 0.49) / math.sqrt(est.zeta_n2_hat(fit))
    assert res.z == pytest.approx(want, rel=1e-12)
    _check_shape(res, 0.1)


def test_quad_norm_rejects_negative_c0(problem):
    with pytest.raises(DomainError):
        inf.test_quad_norm(problem[1], -1.0)


def test_conventional_zero_z(problem):
    d, fit = problem
    b = fit.beta_hat
    res = inf.test_conventional(fit, math.sqrt(b @ b))
    assert res.z == pytest.approx(0.0, abs=1e-12)


def test_conventional_degenerate():
    fit = diag_fit([4.0, 9.0], [0.0, 0.0], 1.0, 10)
    with pytest.raises(DegenerateVarianceError):
        inf.test_conventional(fit, 1.0)


def test_signal_noiseless_raises():
    fit = diag_fit([4.0, 9.0], [1.0, 2.0], 0.0, 10)
    with pytest.raises(DegenerateVarianceError):
        inf.test_signal_detection(fit)


def test_signal_one_and_two_sided(problem):
    res = inf.test_signal_detection(problem[1])
    assert res.p_value_one_sided == pytest.approx(1 - normal_cdf(res.z), abs=1e-15)
    _check_shape(res)


def test_global_at_beta_hat(problem):
    d, fit = problem
    num = inf.global_statistic_numerator(fit, fit.beta_hat)
    assert num == pytest.approx(-fit.trace_inv[0] * fit.sigma2_hat, rel=1e-12)


def test_global_at_zero_equals_signal(problem):
    d, fit = problem
    a = inf.test_global(fit, np.zeros(fit.p))
    b = inf.test_signal_detection(fit)
    assert a.z == pytest.approx(b.z, rel=1e-12)


def test_global_length_mismatch(problem):
    with pytest.raises(DimensionError):
        inf.test_global(problem[1], np.zeros(3))


def test_region_at_beta_hat(problem):
    d, fit = problem
    inside = fit.trace_inv[0] * fit.sigma2_hat <= normal_quantile(0.975) * math.sqrt(
        est.zeta_star2_hat(fit))
    assert inf.confidence_region_contains(fit, fit.beta_hat, side="two") == inside


def test_region_one_sided_contains_far_below(problem):
    d, fit = problem
    # numerator strongly negative can never exceed the one-sided bound
    assert inf.confidence_region_contains(fit, fit.beta_hat, side="one")
    with pytest.raises(DomainError):
        inf.confidence_region_contains(fit, fit.beta_hat, side="both")


def test_error_variance_at_estimate(problem):
    d, fit = problem
    res = inf.test_error_variance(fit, fit.sigma2_hat)
    assert res.z == pytest.approx(0.0, abs=1e-12)
    _check_shape(res)


def test_error_variance_clamps_lower_endpoint():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((6, 3))
    y = rng.standard_normal(6) * np.array([1, 1, 1, 1, 1, 30])
    fit = ols_fit(Dataset(y, x))
    res = inf.test_error_variance(fit, 1.0, alpha=0.5)
    if res.raw_ci[0] < 0:
        assert res.ci_low == 0.0 and inf.FLAG_CLAMPED in res.flags
    else:
        assert res.ci_low == res.raw_ci[0]


def test_rho_at_estimate(problem):
    d, fit = problem
    rho = est.snr_estimates(fit, d).rho_hat
    res = inf.test_rho(fit, d, rho)
    assert res.z == pytest.approx(0.0, abs=1e-12)
    assert res.p_value_one_sided == pytest.approx(0.5)
    assert 0.0 <= res.ci_low <= res.ci_high <= 1.0


def test_rho_one_sided_direction(problem):
    d, fit = problem
    res = inf.test_rho(fit, d, 0.99)
    assert res.p_value_one_sided == pytest.approx(normal_cdf(res.z), abs=1e-15)
    assert res.p_value_one_sided < 0.5


def test_rho_conventional_runs(problem):
    d, fit = problem
    res = inf.test_rho(fit, d, 0.5, conventional=True)
    assert res.name == "rho-conventional"
    _check_shape(res)


def test_rho_domain(problem):
    d, fit = problem
    with pytest.raises(DomainError):
        inf.test_rho(fit, d, 1.0)


def test_eta_interval(problem):
    d, fit = problem
    res = inf.ci_eta(fit, d)
    s = est.snr_estimates(fit, d)
    assert res.estimate == pytest.approx(s.eta_hat)
    assert res.std_error == pytest.approx(math.sqrt(s.sigma2_eta))


def test_linear_zero_contrast(problem):
    with pytest.raises(DegenerateVarianceError):
        inf.linear_functional_inference(problem[1], np.zeros(problem[1].p))


def test_linear_unit_vector_is_classical(problem):
    d, fit = problem
    j = 3
    c = np.zeros(fit.p)
    c[j] = 1.0
    res = inf.linear_functional_inference(fit, c)
    se = math.sqrt(fit.sigma2_hat * dense_inverse(d)[j, j])
    assert res.std_error == pytest.approx(se, rel=1e-10)
    assert res.z == pytest.approx(fit.beta_hat[j] / se, rel=1e-10)


def test_power_at_zero_effect_is_alpha():
    assert inf.asymptotic_power(0.0, 1.0, 0.05) == pytest.approx(0.05, abs=1e-12)
    assert inf.asymptotic_power(10.0, 1.0) > 0.99


def test_power_formula():
    eff, se, q = 1.3, 0.5, normal_quantile(0.975)
    want = 1 - normal_cdf(-eff / se + q) + normal_cdf(-eff / se - q)
    assert inf.asymptotic_power(eff, se) == pytest.approx(want, rel=1e-14)


def test_alpha_domain(problem):
    with pytest.raises(DomainError):
        inf.test_signal_detection(problem[1], alpha=1.0)


def test_result_round_trip(problem):
    res = inf.test_rho(problem[1], problem[0], 0.3)
    back = inf.InferenceResult.from_dict(res.to_dict())
    assert back == res
