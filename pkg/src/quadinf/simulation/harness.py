"""Replication engine and summaries.

A replication evaluates every requested test on one generated dataset and
yields one :class:`ReplicationRecord` per (test, delta). Replications only
depend on ``(seed, rep_index)``, so they can be farmed out to worker
processes; records are always aggregated in replication order, which keeps
summaries bitwise identical whatever the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import inference as inf
from .. import twosample as ts
from ..errors import ConfigError, DegeneracyError
from ..linalg import ols_fit, refit_response
from . import rng
from .cases import SimConfig, assemble, case_params, draw_design, draw_errors, \
    generate_case, generate_two_sample
from .ks import ks_uniformity

ONE_SAMPLE_KINDS = ("quad-norm", "conventional", "signal", "global", "error-variance", "rho",
                    "rho-conventional", "eta", "linear")
TWO_SAMPLE_KINDS = ("two-sample-equality", "coheritability", "coheritability-conventional")
KINDS = ONE_SAMPLE_KINDS + TWO_SAMPLE_KINDS
_NEEDS_SNR = ("rho", "rho-conventional", "eta")


@dataclass(frozen=True)
class ReplicationRecord:
    rep_index: int
    kind: str
    delta: float | None
    p_value: float | None
    covered: bool | None
    estimate: float | None
    std_error: float | None = None
    ci_length: float | None = None
    reject: bool | None = None
    flags: tuple = ()
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def validate(cfg: SimConfig):
    for k in cfg.tests:
        if k not in KINDS:
            raise ConfigError(f"unknown test kind {k!r}")
    if cfg.case == "IV" and any(k in _NEEDS_SNR for k in cfg.tests):
        raise ConfigError("signal-to-noise targets are undefined for the fixed design (case IV)")
    if cfg.two_sample and any(k in ONE_SAMPLE_KINDS for k in cfg.tests):
        raise ConfigError("one- and two-sample tests cannot share a configuration")
    if cfg.delta_grid is not None and cfg.power_kind == "error-variance":
        if min(cfg.delta_grid) <= -math.sqrt(cfg.n):
            raise ConfigError("error-variance grid must keep 1 + delta/sqrt(n) positive")
    if cfg.delta_grid is None and cfg.theta0 is not None and not cfg.two_sample:
        raise ConfigError("theta0 only applies to two-sample tests")


def _covers(res, target):
    return bool(res.ci_low <= target <= res.ci_high)


def _one_sample(kind, d, fit, truth, alpha):
    if kind == "quad-norm":
        res = inf.test_quad_norm(fit, math.sqrt(truth["norm2"]), alpha)
        return res, _covers(res, truth["norm2"]), res.p_value
    if kind == "conventional":
        res = inf.test_conventional(fit, math.sqrt(truth["norm2"]), alpha)
        return res, _covers(res, truth["norm2"]), res.p_value
    if kind == "signal":
        res = inf.test_signal_detection(fit, alpha)
        return res, _covers(res, truth["norm2"]), res.p_value_one_sided
    if kind == "global":
        res = inf.test_global(fit, truth["beta"], alpha)
        covered = inf.confidence_region_contains(fit, truth["beta"], alpha, side="two")
        return res, covered, res.p_value
    if kind == "error-variance":
        res = inf.test_error_variance(fit, truth["sigma2"], alpha)
        return res, _covers(res, truth["sigma2"]), res.p_value
    if kind in ("rho", "rho-conventional"):
        res = inf.test_rho(fit, d, truth["rho"], alpha, conventional=kind != "rho")
        return res, _covers(res, truth["rho"]), res.p_value
    if kind == "eta":
        res = inf.ci_eta(fit, d, alpha, eta_null=truth["eta"])
        return res, _covers(res, truth["eta"]), res.p_value
    if kind == "linear":
        c = np.zeros(fit.p)
        c[0] = 1.0
        res = inf.linear_functional_inference(fit, c, alpha, null=float(truth["beta"][0]))
        return res, _covers(res, float(truth["beta"][0])), res.p_value
    raise ConfigError(f"unknown test kind {kind!r}")


def _two_sample(kind, pair, truth, alpha):
    if kind == "two-sample-equality":
        res = ts.test_equality(pair, alpha)
        return res, _covers(res, truth["diff_norm2"]), res.p_value
    res = ts.test_coheritability(pair, truth["theta"], alpha,
                                 conventional=kind == "coheritability-conventional")
    return res, _covers(res, truth["theta"]), res.p_value


def _record(rep, kind, delta, alpha, fn):
    try:
        res, covered, p = fn()
    except DegeneracyError as exc:
        return ReplicationRecord(rep, kind, delta, None, None, None, error=type(exc).__name__)
    return ReplicationRecord(rep, kind, delta, float(p), bool(covered), res.estimate,
                             std_error=res.std_error, ci_length=res.ci_length,
                             reject=bool(p < alpha), flags=tuple(res.flags))


def _fit_or_fail(rep, kinds, delta, data):
    try:
        return ols_fit(data), None
    except DegeneracyError as exc:
        return None, [ReplicationRecord(rep, k, delta, None, None, None, error=type(exc).__name__)
                      for k in kinds]


def replicate(cfg: SimConfig, rep: int) -> list:
    """All records for one replication."""
    alpha = cfg.alpha
    if cfg.delta_grid is not None:
        return _replicate_power(cfg, rep)
    if cfg.two_sample:
        da, db, truth = generate_two_sample(cfg, rep)
        fa, bad = _fit_or_fail(rep, cfg.tests, None, da)
        if bad:
            return bad
        fb, bad = _fit_or_fail(rep, cfg.tests, None, db)
        if bad:
            return bad
        pair = ts.two_sample_fit(fa, fb)
        return [_record(rep, k, None, alpha, lambda k=k: _two_sample(k, pair, truth, alpha))
                for k in cfg.tests]
    d, truth = generate_case(cfg, rep)
    fit, bad = _fit_or_fail(rep, cfg.tests, None, d)
    if bad:
        return bad
    return [_record(rep, k, None, alpha, lambda k=k: _one_sample(k, d, fit, truth, alpha))
            for k in cfg.tests]


def power_beta(delta, n, p, sigma=1.0):
    """Equal-entry coefficient vector on the signal-detection grid."""
    return np.full(p, delta * sigma / (math.sqrt(n) * p ** 0.25))


def _replicate_power(cfg, rep):
    # one design and one error draw shared by the whole delta grid
    params = case_params(cfg)
    x = draw_design(cfg, params, rng.stream(cfg.seed, rep, rng.DESIGN))
    e = draw_errors(cfg, rng.stream(cfg.seed, rep, rng.ERROR))
    kind = cfg.power_kind
    out = []
    base = None
    for delta in cfg.delta_grid:
        if kind == "signal":
            beta, scale, sigma2 = power_beta(delta, cfg.n, cfg.p), 1.0, 1.0
        else:
            beta, sigma2 = params.beta, 1.0 + delta / math.sqrt(cfg.n)
            scale = math.sqrt(sigma2)
        d = assemble(x, beta, e, scale)
        if base is None:
            base, bad = _fit_or_fail(rep, (kind,), delta, d)
            if bad:
                return [ReplicationRecord(rep, kind, dl, None, None, None, error=bad[0].error)
                        for dl in cfg.delta_grid]
            fit = base
        else:
            fit = refit_response(base, d.x, d.y)
        fn = lambda fit=fit, beta=beta, sigma2=sigma2: _power_eval(kind, fit, beta, sigma2,
                                                                  cfg.alpha)
        out.append(_record(rep, kind, delta, cfg.alpha, fn))
    return out


def _power_eval(kind, fit, beta, sigma2, alpha):
    if kind == "signal":
        res = inf.test_signal_detection(fit, alpha)
        return res, _covers(res, float(beta @ beta)), res.p_value_one_sided
    res = inf.test_error_variance(fit, 1.0, alpha)
    return res, _covers(res, sigma2), res.p_value


def _chunk(args):
    cfg, lo, hi = args
    recs = []
    for r in range(lo, hi):
        recs.extend(replicate(cfg, r))
    return recs


def collect_records(cfg: SimConfig, workers: int = 1) -> list:
    """Run every replication and return the records in replication order."""
    validate(cfg)
    if workers is None or workers <= 1 or cfg.reps < 2:
        return _chunk((cfg, 0, cfg.reps))
    nchunks = min(cfg.reps, 4 * workers)
    edges = np.linspace(0, cfg.reps, nchunks + 1).astype(int)
    jobs = [(cfg, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    recs = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order
        for part in pool.map(_chunk, jobs):
            recs.extend(part)
    return recs


def _mean(vals):
    return float(np.mean(vals)) if len(vals) else None


def summarize_group(kind, delta, records, alpha) -> dict:
    ok = [r for r in records if not r.failed]
    m = len(ok)
    row = {"kind": kind, "delta": delta, "replications": len(records), "used": m,
           "failed": len(records) - m, "flagged": sum(1 for r in ok if r.flags)}
    if m == 0:
        row.update(ks_statistic=None, ks_p_value=None, coverage=None, mean_ci_length=None,
                   rejection_rate=None, estimate_mean=None, estimate_var=None,
                   estimate_se=None, mean_std_error=None, median_variance=None)
        return row
    pv = np.array([r.p_value for r in ok])
    est = np.array([r.estimate for r in ok])
    se = np.array([r.std_error for r in ok])
    dstat, kp = ks_uniformity(pv)
    var = float(np.var(est, ddof=1)) if m > 1 else 0.0
    row.update(
        ks_statistic=dstat, ks_p_value=kp,
        coverage=_mean([float(r.covered) for r in ok]),
        mean_ci_length=_mean([r.ci_length for r in ok]),
        rejection_rate=_mean([float(r.reject) for r in ok]),
        estimate_mean=float(np.mean(est)), estimate_var=var,
        estimate_se=math.sqrt(var / m),
        mean_std_error=float(np.mean(se)),
        median_variance=float(np.median(se * se)),
    )
    return row


def summarize(cfg: SimConfig, records: list) -> dict:
    """Aggregate records per (kind, delta), in the configured order."""
    rows = []
    deltas = cfg.delta_grid if cfg.delta_grid is not None else (None,)
    kinds = (cfg.power_kind,) if cfg.delta_grid is not None else cfg.tests
    for kind in kinds:
        for delta in deltas:
            group = [r for r in records if r.kind == kind and r.delta == delta]
            rows.append(summarize_group(kind, delta, group, cfg.alpha))
    params = case_params(cfg)
    truth = {"norm2": params.norm2, "sigma2": params.sigma2, "eta": params.eta,
             "rho": params.rho}
    if params.gamma is not None:
        g = params.gamma
        truth["gamma_norm2"] = float(g @ g)
        truth["diff_norm2"] = float((params.beta - g) @ (params.beta - g))
        truth["theta"] = float(params.beta @ g) / math.sqrt(params.norm2 * float(g @ g))
    return {"config": cfg.to_dict(), "truth": truth, "rows": rows}


def run_replications(cfg: SimConfig, workers: int = 1, return_records: bool = False):
    """Run ``cfg`` and return its summary (and optionally the raw records)."""
    records = collect_records(cfg, workers)
    summary = summarize(cfg, records)
    return (summary, records) if return_records else summary


def qq_points(p_values) -> list:
    """Sorted p-values paired with the uniform plotting positions (i - 0.5)/m."""
    u = np.sort(np.asarray(p_values, dtype=float))
    theo = (np.arange(1, u.size + 1) - 0.5) / u.size
    return [(float(a), float(b)) for a, b in zip(theo, u)]
