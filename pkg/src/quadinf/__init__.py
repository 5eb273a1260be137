"""Bias- and variance-corrected inference for quadratic functionals of
regression coefficients when the dimension grows with the sample size."""

__version__ = "0.1.0"

from .errors import (ConfigError, DegeneracyError, DegenerateDenominatorError,
                     DegenerateDesignError, DegenerateScaleError, DegenerateVarianceError,
                     DimensionError, DomainError, ParseError, QuadinfError, SingularGramError)
from .estimators import (conventional_rho, nu4_hat, quad_norm_estimate, snr_estimates,
                         variance_estimates, zeta0_2_hat, zeta_eps2_hat, zeta_n2_hat,
                         zeta_star2_hat)
from .inference import (InferenceResult, asymptotic_power, ci_eta, confidence_region_contains,
                        linear_functional_inference, test_conventional, test_error_variance,
                        test_global, test_quad_norm, test_rho, test_signal_detection)
from .linalg import (Dataset, ModelFit, center_dataset, cross_trace, make_dataset, ols_fit,
                     quad_form_inv, refit_response, repair_rank, trace_inv_power)
from .ingest import ingest_csv
from .normal import normal_cdf, normal_quantile
from .twosample import (TwoSampleFit, diff_norm_estimate, sigma2_diff_hat, sigma2_theta_hat,
                        test_coheritability, test_equality, theta_hat, two_sample_fit)
