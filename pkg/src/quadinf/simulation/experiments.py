"""Experiment grids behind ``quadinf reproduce``.

Each function returns ``(columns, rows, plot)`` where ``plot`` holds the
QQ or power-curve series used for CSV/PNG output.
"""

from __future__ import annotations

from .cases import SimConfig
from .harness import qq_points, run_replications

SIGNAL_GRID = tuple(0.5 * k for k in range(13))
VARIANCE_GRID = tuple(float(d) for d in range(-10, 11, 2))

DEFAULT_REPS = {"calibration": 2000, "coverage": 1000, "power": 500, "two-sample": 2000}


def p_grid(n: int) -> tuple:
    """Fixed, low and two moderate dimensions for sample size ``n``."""
    return (4, n // 6, n // 4, int(n / 2.5))


def _cells(ns, cases, ps=None):
    for n in ns:
        for p in (ps or p_grid(n)):
            if p >= n:
                continue
            for case in cases:
                yield n, p, case


def coverage_table(ns=(400,), reps=1000, seed=0, cases=("I", "II", "III", "IV"), ps=None,
                   alpha=0.05, workers=1):
    cols = ["n", "p", "case", "kind", "coverage", "mean_ci_length", "failed", "flagged"]
    rows = []
    for n, p, case in _cells(ns, cases, ps):
        tests = ("global", "error-variance") if case == "IV" else \
            ("global", "error-variance", "eta", "rho")
        cfg = SimConfig(case=case, n=n, p=p, reps=reps, seed=seed, tests=tests, alpha=alpha)
        for r in run_replications(cfg, workers)["rows"]:
            rows.append([n, p, case, r["kind"], r["coverage"], r["mean_ci_length"], r["failed"],
                         r["flagged"]])
    return cols, rows, {}


def calibration_table(ns=(400,), reps=2000, seed=0, cases=("I", "II", "III"), ps=None,
                      alpha=0.05, workers=1):
    """Null p-value uniformity (KS) for the proposed and conventional tests."""
    cols = ["n", "p", "case", "kind", "ks_statistic", "ks_p_value", "rejection_rate", "failed"]
    rows = []
    qq = {}
    for n, p, case in _cells(ns, cases, ps):
        designs = [
            SimConfig(case=case, n=n, p=p, reps=reps, seed=seed, alpha=alpha,
                      tests=("quad-norm", "conventional", "error-variance")
                      + (() if case == "IV" else ("rho", "rho-conventional"))),
            SimConfig(case=case, n=n, p=p, reps=reps, seed=seed, alpha=alpha, beta="zero",
                      tests=("signal",)),
        ]
        for cfg in designs:
            summary, recs = run_replications(cfg, workers, return_records=True)
            for r in summary["rows"]:
                rows.append([n, p, case, r["kind"], r["ks_statistic"], r["ks_p_value"],
                             r["rejection_rate"], r["failed"]])
                pv = [x.p_value for x in recs if x.kind == r["kind"] and not x.failed]
                qq[f"{r['kind']} n={n} p={p} case {case}"] = qq_points(pv)
    return cols, rows, {"qq": qq}


def power_table(ns=(400,), reps=500, seed=0, cases=("I", "II", "III", "IV"), alpha=0.05,
                workers=1):
    cols = ["n", "p", "case", "kind", "delta", "rejection_rate", "failed"]
    rows = []
    curves = {}
    for kind, grid in (("signal", SIGNAL_GRID), ("error-variance", VARIANCE_GRID)):
        for n in ns:
            ps = p_grid(n)[1:] if kind == "signal" else p_grid(n)
            for p, case in ((p, c) for p in ps for c in cases):
                cfg = SimConfig(case=case, n=n, p=p, reps=reps, seed=seed, alpha=alpha,
                                delta_grid=grid, power_kind=kind, tests=())
                summary = run_replications(cfg, workers)
                rates = []
                for r in summary["rows"]:
                    rows.append([n, p, case, kind, r["delta"], r["rejection_rate"], r["failed"]])
                    rates.append(r["rejection_rate"])
                curves[f"{kind} n={n} p={p} case {case}"] = (list(grid), rates)
    return cols, rows, {"power": curves}


def two_sample_table(ns=(400,), reps=2000, seed=0, cases=("I",), ps=(66,), alpha=0.05,
                     workers=1):
    cols = ["n", "p", "case", "kind", "theta0", "ks_p_value", "coverage", "estimate_mean",
            "estimate_se", "truth"]
    rows = []
    for n, p, case in _cells(ns, cases, ps):
        designs = [(None, ("two-sample-equality",)), (0.0, ("coheritability",)),
                   (0.5, ("coheritability",))]
        for theta0, tests in designs:
            cfg = SimConfig(case=case, n=n, p=p, reps=reps, seed=seed, alpha=alpha,
                            tests=tests, theta0=theta0)
            summary = run_replications(cfg, workers)
            truth = summary["truth"]
            for r in summary["rows"]:
                target = truth["diff_norm2"] if r["kind"] == "two-sample-equality" \
                    else truth["theta"]
                rows.append([n, p, case, r["kind"], theta0, r["ks_p_value"], r["coverage"],
                             r["estimate_mean"], r["estimate_se"], target])
    return cols, rows, {}


TABLES = {"coverage": coverage_table, "calibration": calibration_table, "power": power_table,
          "two-sample": two_sample_table}
