"""Shared fixtures and brute-force oracles for the test-suite."""

import numpy as np

from quadinf.linalg import Dataset, ols_fit


def random_problem(rng, n, p, noise=1.0):
    x = rng.standard_normal((n, p))
    beta = rng.standard_normal(p)
    y = x @ beta + noise * rng.standard_normal(n)
    return Dataset(y, x)


def dense_inverse(fit_or_x):
    x = fit_or_x.x if isinstance(fit_or_x, Dataset) else fit_or_x
    return np.linalg.inv(x.T @ x)


def rel_err(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    scale = max(np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


def diag_fit(diag, beta_hat, sigma2, n):
    """Fit whose Gram matrix is diag(diag) with the requested beta_hat and sigma2_hat.

    Column j of X is sqrt(diag_j) e_j; the residual lives on the remaining
    rows with squared norm sigma2 * (n - p).
    """
    diag = np.asarray(diag, float)
    beta_hat = np.asarray(beta_hat, float)
    p = diag.size
    x = np.zeros((n, p))
    x[np.arange(p), np.arange(p)] = np.sqrt(diag)
    y = x @ beta_hat
    m = n - p
    y[p:] = np.sqrt(sigma2)  # m entries of sqrt(sigma2): squared norm sigma2 * m
    fit = ols_fit(Dataset(y, x))
    assert np.allclose(fit.beta_hat, beta_hat) and np.isclose(fit.sigma2_hat, sigma2)
    return fit
