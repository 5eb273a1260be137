"""Data-generating designs for the Monte Carlo experiments.

All cases use ``Y = 1 + X beta + eps`` with ``E X = mu``, ``mu_j ~ U[1, 2]``,
and centre both ``Y`` and ``X`` before anything is fitted.

I    Gaussian design, identity covariance, beta = b / ||b||, b_j ~ U[1, 2]
II   Gaussian design with a random dense covariance; beta along the
     eigenvector of the smallest eigenvalue, scaled by :func:`case2_scale`
III  standardized t_5 design, standardized t_16 errors, beta = (1, 1, 1, 0, ...)
IV   one case-I design reused by every replication; beta is the top
     eigenvector of the centred scatter matrix

Quantities that are fixed for a configuration (``mu``, the covariance,
the case IV design, ...) come from :func:`~quadinf.simulation.rng.config_stream`
so every replication and every worker process sees the same values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import ConfigError, DomainError
from ..linalg import Dataset
from . import rng

CASES = ("I", "II", "III", "IV")
BETA_CHOICES = ("default", "zero", "unif01")

# config-level substreams
_MU, _BETA, _SIGMA, _FIXED_X, _GAMMA_DIR, _MU_B = range(6)


@dataclass(frozen=True)
class SimConfig:
    """One Monte Carlo design.

    ``tests`` lists the procedures evaluated on every replication. With a
    ``delta_grid`` the replications instead trace a power curve for
    ``power_kind`` ("signal" or "error-variance"); the same design and error
    draws are reused across the grid.
    """

    case: str = "I"
    n: int = 400
    p: int = 100
    reps: int = 1000
    seed: int = 0
    tests: tuple = ("quad-norm",)
    alpha: float = 0.05
    beta: str = "default"
    beta_norm: float | None = None
    delta_grid: tuple | None = None
    power_kind: str | None = None
    theta0: float | None = None
    n_b: int | None = None

    def __post_init__(self):
        if self.case not in CASES:
            raise ConfigError(f"unknown case {self.case!r}; expected one of {', '.join(CASES)}")
        if not (1 <= self.p < self.n):
            raise ConfigError(f"need 1 <= p < n; got n={self.n}, p={self.p}")
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.beta not in BETA_CHOICES:
            raise ConfigError(f"beta must be one of {BETA_CHOICES}")
        if self.theta0 is not None and not -1.0 < self.theta0 < 1.0:
            raise ConfigError("theta0 must lie in (-1, 1)")
        if self.n_b is not None and not self.p < self.n_b:
            raise ConfigError("second sample needs n_b > p")
        object.__setattr__(self, "tests", tuple(self.tests))
        if self.delta_grid is not None:
            object.__setattr__(self, "delta_grid", tuple(float(d) for d in self.delta_grid))
            if self.power_kind not in ("signal", "error-variance"):
                raise ConfigError("a delta grid needs power_kind 'signal' or 'error-variance'")

    @property
    def two_sample(self) -> bool:
        return any(t in ("two-sample-equality", "coheritability") for t in self.tests)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["tests"] = list(self.tests)
        if self.delta_grid is not None:
            d["delta_grid"] = list(self.delta_grid)
        return d


def case2_scale(n: int, p: int) -> float:
    """Signal multiplier for case II: 1 at fixed p, 2 at low, 5 at high p/n."""
    ratio = p / n
    if ratio < 1.0 / 12.0:
        return 1.0
    if ratio < 0.325:
        return 2.0
    return 5.0


def _unit_sign(v):
    v = v / np.linalg.norm(v)
    nz = np.flatnonzero(np.abs(v) > 0)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


@dataclass(frozen=True)
class CaseParams:
    """Per-configuration parameters and exact truths."""

    mu: np.ndarray
    beta: np.ndarray
    sigma_chol: np.ndarray | None
    fixed_x: np.ndarray | None
    eta: float | None
    sigma2: float = 1.0
    gamma: np.ndarray | None = None
    mu_b: np.ndarray | None = None

    @property
    def norm2(self) -> float:
        return float(self.beta @ self.beta)

    @property
    def rho(self) -> float | None:
        return None if self.eta is None else self.eta / (self.eta + self.sigma2)


def _case_i_design(gen, n, mu):
    return mu + rng.sample_standard_normal(gen, (n, mu.size))


@lru_cache(maxsize=64)
def case_params(cfg: SimConfig) -> CaseParams:
    """Draw (once per configuration) everything that does not vary by replication."""
    n, p, seed = cfg.n, cfg.p, cfg.seed
    mu = 1.0 + rng.sample_uniform(rng.config_stream(seed, _MU), p)
    sigma_chol = None
    fixed_x = None
    cov = None
    if cfg.case == "I":
        b = 1.0 + rng.sample_uniform(rng.config_stream(seed, _BETA), p)
        beta = b / np.linalg.norm(b)
    elif cfg.case == "II":
        g = rng.config_stream(seed, _SIGMA)
        star = rng.sample_uniform(g, (p, p)) - 0.5
        d = 0.4 + 0.6 * rng.sample_uniform(g, p)
        sts = star.T @ star
        cov = sts / np.linalg.eigvalsh(sts)[-1] + np.diag(d)
        w, v = np.linalg.eigh(cov)
        beta = case2_scale(n, p) * _unit_sign(v[:, 0])
        sigma_chol = np.linalg.cholesky(cov)
    elif cfg.case == "III":
        beta = np.zeros(p)
        beta[:min(3, p)] = 1.0
    else:
        x = _case_i_design(rng.config_stream(seed, _FIXED_X), n, mu)
        xc = x - x.mean(axis=0)
        w, v = np.linalg.eigh(xc.T @ xc)
        beta = _unit_sign(v[:, -1])
        fixed_x = x
        fixed_x.setflags(write=False)

    if cfg.beta == "zero":
        beta = np.zeros(p)
    elif cfg.beta == "unif01":
        beta = rng.sample_uniform(rng.config_stream(seed, _BETA), p)
    if cfg.beta_norm is not None:
        nb = np.linalg.norm(beta)
        if nb == 0:
            raise ConfigError("cannot rescale a zero coefficient vector")
        beta = beta * (cfg.beta_norm / nb)

    if cfg.case == "IV":
        eta = None
    elif cov is not None:
        eta = float(beta @ cov @ beta)
    else:
        eta = float(beta @ beta)

    gamma = mu_b = None
    if cfg.two_sample:
        if cfg.case == "IV":
            raise ConfigError("two-sample simulations support cases I-III")
        mu_b = 1.0 + rng.sample_uniform(rng.config_stream(seed, _MU_B), p)
        if cfg.theta0 is None:
            gamma = beta.copy()
        else:
            nb = np.linalg.norm(beta)
            u = beta / nb
            w = rng.sample_standard_normal(rng.config_stream(seed, _GAMMA_DIR), p)
            w = w - (w @ u) * u
            w = w / np.linalg.norm(w)
            t = cfg.theta0
            gamma = nb * (t * u + math.sqrt(1.0 - t * t) * w)
    return CaseParams(mu=mu, beta=beta, sigma_chol=sigma_chol, fixed_x=fixed_x, eta=eta,
                      gamma=gamma, mu_b=mu_b)


def draw_design(cfg: SimConfig, params: CaseParams, gen, n=None, mu=None):
    """Uncentred design for one replication."""
    n = cfg.n if n is None else n
    mu = params.mu if mu is None else mu
    if cfg.case == "IV":
        return params.fixed_x
    if cfg.case == "III":
        return mu + rng.sample_student_t(gen, 5.0, scale=True, size=(n, mu.size))
    z = rng.sample_standard_normal(gen, (n, mu.size))
    if params.sigma_chol is not None:
        z = z @ params.sigma_chol.T
    return mu + z


def draw_errors(cfg: SimConfig, gen, n=None):
    n = cfg.n if n is None else n
    if cfg.case == "III":
        return rng.sample_student_t(gen, 16.0, scale=True, size=n)
    return rng.sample_standard_normal(gen, n)


def assemble(x, beta, errors, error_scale: float = 1.0) -> Dataset:
    """Centred dataset for ``Y = 1 + X beta + error_scale * errors``."""
    y = 1.0 + x @ beta + error_scale * errors
    return Dataset(y - y.mean(), x - x.mean(axis=0), centered=True)


def truth_of(params: CaseParams) -> dict:
    return {"beta": params.beta, "sigma2": params.sigma2, "norm2": params.norm2,
            "eta": params.eta, "rho": params.rho}


def generate_case(cfg: SimConfig, rep_index: int):
    """One replication: ``(Dataset, truth)`` with exact truth values."""
    if rep_index < 0:
        raise DomainError("rep_index must be non-negative")
    params = case_params(cfg)
    x = draw_design(cfg, params, rng.stream(cfg.seed, rep_index, rng.DESIGN))
    e = draw_errors(cfg, rng.stream(cfg.seed, rep_index, rng.ERROR))
    return assemble(x, params.beta, e), truth_of(params)


def generate_two_sample(cfg: SimConfig, rep_index: int):
    """Two independent samples ``(Dataset_a, Dataset_b, truth)`` under ``cfg``."""
    params = case_params(cfg)
    if params.gamma is None:
        raise ConfigError("configuration does not request a two-sample test")
    nb = cfg.n if cfg.n_b is None else cfg.n_b
    xa = draw_design(cfg, params, rng.stream(cfg.seed, rep_index, rng.DESIGN))
    ea = draw_errors(cfg, rng.stream(cfg.seed, rep_index, rng.ERROR))
    xb = draw_design(cfg, params, rng.stream(cfg.seed, rep_index, rng.DESIGN_B), n=nb,
                     mu=params.mu_b)
    eb = draw_errors(cfg, rng.stream(cfg.seed, rep_index, rng.ERROR_B), n=nb)
    b, g = params.beta, params.gamma
    d = b - g
    truth = truth_of(params)
    truth.update(gamma=g, diff_norm2=float(d @ d),
                 theta=float(b @ g) / math.sqrt(float(b @ b) * float(g @ g)))
    return assemble(xa, b, ea), assemble(xb, g, eb), truth
