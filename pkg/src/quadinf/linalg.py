"""Data preparation, OLS fitting and Gram-matrix derived quantities.

Everything downstream consumes a :class:`ModelFit`, which holds the lower
Cholesky factor ``L`` of ``X^T X`` together with its triangular inverse
``M = L^{-1}``. Since ``(X^T X)^{-1} = M^T M``, traces of inverse powers and
quadratic forms reduce to products with ``M`` and never need the dense
inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DegenerateDesignError, DimensionError, SingularGramError

RANK_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Response vector and design matrix plus preparation metadata.

    Parameters
    ----------
    y : array, shape (n,)
    x : array, shape (n, p)
    centered : bool
        Whether ``y`` and every column of ``x`` have been mean-centred.
    dropped_columns : tuple of int
        Original column indices removed by :func:`repair_rank`.
    column_names : tuple of str, optional
        Names of the retained columns, if known.
    imputed : tuple of (name, count)
        Missing cells filled in per column during ingestion.
    """

    y: np.ndarray
    x: np.ndarray
    centered: bool = False
    dropped_columns: tuple = ()
    column_names: tuple = ()
    imputed: tuple = ()

    def __post_init__(self):
        y = _frozen(self.y)
        x = _frozen(self.x)
        if x.ndim == 1:
            x = _frozen(x[:, None])
        if y.ndim != 1 or x.ndim != 2 or x.shape[0] != y.shape[0]:
            raise DimensionError(
                f"expected y of shape (n,) and x of shape (n, p); got {y.shape} and {x.shape}")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "dropped_columns", tuple(int(j) for j in self.dropped_columns))
        object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "imputed", tuple(tuple(t) for t in self.imputed))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


def center_dataset(raw) -> Dataset:
    """Subtract column means from ``x`` and the mean from ``y``.

    ``raw`` is a :class:`Dataset` or a ``(y, x)`` pair. The input is not
    modified.
    """
    if isinstance(raw, Dataset):
        y, x = raw.y, raw.x
        dropped, names, imputed = raw.dropped_columns, raw.column_names, raw.imputed
    else:
        y, x = raw
        dropped, names, imputed = (), (), ()
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if y.shape[0] < 2:
        raise DimensionError("centering needs at least 2 rows")
    return Dataset(y - y.mean(), x - x.mean(axis=0), centered=True,
                   dropped_columns=dropped, column_names=names, imputed=imputed)


def repair_rank(x, tol: float = RANK_TOL):
    """Drop linearly dependent columns, keeping the earliest ones.

    Columns are processed in their original order by an incremental
    Cholesky factorization of ``x^T x``; a column whose pivot falls to
    ``tol * max(diag(x^T x))`` or below is dependent on the columns already
    kept and is dropped.

    Returns
    -------
    (matrix, dropped) where ``dropped`` lists removed indices in ascending
    order.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < 1:
        raise DimensionError("design has no rows")
    gram = x.T @ x
    scale = float(np.max(np.diag(gram))) if gram.size else 0.0
    if not scale > 0.0:
        raise DegenerateDesignError("every column of the design is zero")
    thresh = tol * scale
    kept: list[int] = []
    dropped: list[int] = []
    chol = np.zeros((0, 0))
    for j in range(x.shape[1]):
        g = gram[kept, j]
        if kept:
            w = linalg.solve_triangular(chol, g, lower=True)
            pivot = gram[j, j] - w @ w
        else:
            w = np.zeros(0)
            pivot = gram[j, j]
        if pivot <= thresh:
            dropped.append(j)
            continue
        k = len(kept)
        grown = np.zeros((k + 1, k + 1))
        grown[:k, :k] = chol
        grown[k, :k] = w
        grown[k, k] = np.sqrt(pivot)
        chol = grown
        kept.append(j)
    if not kept:
        raise DegenerateDesignError("rank repair removed every column")
    return x[:, kept], dropped


def make_dataset(y, x, center: bool = False, repair: bool = True, tol: float = RANK_TOL,
                 column_names=(), imputed=()) -> Dataset:
    """Build a :class:`Dataset`, optionally centring and repairing rank."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    names = list(column_names)
    if center:
        d = center_dataset((y, x))
        y, x = d.y, d.x
    dropped: list[int] = []
    if repair:
        x, dropped = repair_rank(x, tol)
        if names:
            names = [c for j, c in enumerate(names) if j not in set(dropped)]
    if x.shape[0] <= x.shape[1]:
        raise DimensionError(f"need n > p after rank repair; got n={x.shape[0]}, p={x.shape[1]}")
    return Dataset(y, x, centered=center, dropped_columns=dropped, column_names=names,
                   imputed=imputed)


@dataclass(frozen=True)
class ModelFit:
    """OLS fit with the Gram factorization and cached inverse-power traces."""

    beta_hat: np.ndarray
    sigma2_hat: float
    gram_chol: np.ndarray
    chol_inv: np.ndarray
    trace_inv: tuple
    residuals: np.ndarray
    n: int
    p: int
    gram: np.ndarray = field(repr=False)

    @property
    def rss(self) -> float:
        return float(self.residuals @ self.residuals)


def _cholesky(gram, tol=RANK_TOL):
    scale = float(np.max(np.diag(gram)))
    if not scale > 0.0:
        raise SingularGramError("Gram matrix has a zero diagonal")
    try:
        chol = linalg.cholesky(gram, lower=True)
    except linalg.LinAlgError as exc:
        raise SingularGramError("Gram matrix is not positive definite") from exc
    if np.min(np.diag(chol)) ** 2 <= tol * scale:
        raise SingularGramError("Gram matrix is numerically singular at the rank tolerance")
    return chol


def _traces(chol_inv):
    m = chol_inv
    b = m @ m.T  # similar to (X^T X)^{-1}
    t1 = float(np.sum(m * m))
    t2 = float(np.sum(b * b))
    t3 = float(np.sum(b * (b @ b)))
    return (t1, t2, t3)


def ols_fit(d: Dataset) -> ModelFit:
    """Least-squares fit of ``d.y`` on ``d.x`` (no intercept is added)."""
    n, p = d.n, d.p
    if n <= p:
        raise DimensionError(f"need n > p; got n={n}, p={p}")
    gram = d.x.T @ d.x
    chol = _cholesky(gram)
    chol_inv = linalg.solve_triangular(chol, np.eye(p), lower=True)
    beta = linalg.cho_solve((chol, True), d.x.T @ d.y)
    resid = d.y - d.x @ beta
    sigma2 = float(resid @ resid) / (n - p)
    return ModelFit(beta_hat=_frozen(beta), sigma2_hat=sigma2, gram_chol=_frozen(chol),
                    chol_inv=_frozen(chol_inv), trace_inv=_traces(chol_inv),
                    residuals=_frozen(resid), n=n, p=p, gram=_frozen(gram))


def trace_inv_power(fit: ModelFit, k: int) -> float:
    """tr{(X^T X)^{-k}} for k in {1, 2, 3}."""
    if k not in (1, 2, 3):
        raise DimensionError("k must be 1, 2 or 3")
    return fit.trace_inv[k - 1]


def quad_form_inv(fit: ModelFit, a, b=None, k: int = 1) -> float:
    """a^T (X^T X)^{-k} b for k in {1, 2}; ``b`` defaults to ``a``."""
    a = np.asarray(a, dtype=float)
    b = a if b is None else np.asarray(b, dtype=float)
    if a.shape != (fit.p,) or b.shape != (fit.p,):
        raise DimensionError(f"vectors must have length p={fit.p}")
    if k == 1:
        ma = fit.chol_inv @ a
        mb = ma if b is a else fit.chol_inv @ b
        return float(ma @ mb)
    if k == 2:
        ga = linalg.cho_solve((fit.gram_chol, True), a)
        gb = ga if b is a else linalg.cho_solve((fit.gram_chol, True), b)
        return float(ga @ gb)
    raise DimensionError("k must be 1 or 2")


def cross_trace(fit_a: ModelFit, fit_b: ModelFit) -> float:
    """tr{(X^T X)^{-1} (V^T V)^{-1}} for two fits sharing p."""
    if fit_a.p != fit_b.p:
        raise DimensionError(f"fits disagree on p: {fit_a.p} vs {fit_b.p}")
    # tr(Ma^T Ma Mb^T Mb) = ||Ma Mb^T||_F^2
    c = fit_a.chol_inv @ fit_b.chol_inv.T
    return float(np.sum(c * c))


def refit_response(fit: ModelFit, x, y) -> ModelFit:
    """Refit a new response on the design that produced ``fit``.

    The Gram factorization and traces are reused; ``x`` must be that same
    design (it is not re-checked).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.shape != (fit.n,):
        raise DimensionError(f"response must have length n={fit.n}")
    beta = linalg.cho_solve((fit.gram_chol, True), x.T @ y)
    resid = y - x @ beta
    return ModelFit(beta_hat=_frozen(beta), sigma2_hat=float(resid @ resid) / (fit.n - fit.p),
                    gram_chol=fit.gram_chol, chol_inv=fit.chol_inv, trace_inv=fit.trace_inv,
                    residuals=_frozen(resid), n=fit.n, p=fit.p, gram=fit.gram)
