"""Command-line driver.

Exit status: 0 on success, 2 for configuration/usage errors, 3 when the
data are numerically degenerate for the requested procedure.
"""

from __future__ import annotations

import argparse
import datetime
import os
import sys

import numpy as np

from . import __version__
from . import inference as inf
from . import twosample as ts
from .errors import ConfigError, DegeneracyError
from .ingest import MISSING_TOKENS, ingest_csv
from .linalg import ols_fit
from .report import Report, table_csv
from .simulation.cases import BETA_CHOICES, CASES, SimConfig
from .simulation.experiments import DEFAULT_REPS, SIGNAL_GRID, TABLES, VARIANCE_GRID
from .simulation.harness import KINDS, qq_points, run_replications

ONE_SAMPLE = ("quad-norm", "conventional", "signal", "global", "error-variance", "rho", "eta",
              "linear")
TWO_SAMPLE = ("two-sample-equality", "coheritability")

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE = 0, 2, 3
# options that never change the numbers in a report
_NOT_ECHOED = {"out", "plot_data", "workers", "timestamp", "func"}


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _tokens(text):
    return frozenset(t.strip() for t in text.split(","))


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--timestamp", action="store_true",
                   help="record the wall-clock time in the report (breaks byte-identity)")


def _add_data(p):
    p.add_argument("--input", required=True)
    p.add_argument("--response", default="0",
                   help="response column name or 0-based index (default: first column)")
    p.add_argument("--center", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--missing", type=_tokens, default=MISSING_TOKENS,
                   help="comma-separated missing-value tokens (default: empty and NA)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadinf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="one-sample inference on a CSV dataset")
    _add_data(p)
    _add_common(p)
    p.add_argument("--kind", required=True, choices=ONE_SAMPLE)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--null", type=float, help="null value of the target parameter")
    g.add_argument("--null-norm", type=float, help="null ||beta|| (quad-norm, conventional)")
    p.add_argument("--null-beta", type=_floats, help="comma-separated beta under the null (global)")
    p.add_argument("--contrast", type=_floats, help="comma-separated vector c (linear)")
    p.add_argument("--conventional", action="store_true",
                   help="use the uncorrected statistic (rho)")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("two-sample", help="compare coefficients of two independent datasets")
    _add_data(p)
    _add_common(p)
    p.add_argument("--input-b", required=True)
    p.add_argument("--kind", required=True, choices=TWO_SAMPLE)
    p.add_argument("--null", type=float, default=0.0, help="null theta (coheritability)")
    p.add_argument("--conventional", action="store_true")
    p.set_defaults(func=cmd_two_sample)

    p = sub.add_parser("simulate", help="run one Monte Carlo configuration")
    _add_common(p)
    p.add_argument("--case", choices=CASES, default="I")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--p", type=int, default=100)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--kind", "--test", dest="kinds", action="append", choices=KINDS)
    p.add_argument("--beta", choices=BETA_CHOICES, default="default")
    p.add_argument("--null-norm", type=float, help="rescale the true beta to this norm")
    p.add_argument("--power", choices=("signal", "error-variance"),
                   help="trace a power curve over --delta-grid instead")
    p.add_argument("--delta-grid", type=_floats)
    p.add_argument("--theta0", type=float)
    p.add_argument("--n-b", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plot-data", metavar="DIR", help="write QQ/power CSVs and PNGs here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="run a bundled experiment grid")
    _add_common(p)
    p.add_argument("--table", choices=tuple(TABLES) + ("all",), required=True)
    p.add_argument("--reps", type=int, help="replications per cell (default depends on table)")
    p.add_argument("--n", type=int, action="append", help="sample size(s); default 400")
    p.add_argument("--p", type=int, action="append", help="restrict the dimension grid")
    p.add_argument("--case", choices=CASES, action="append")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plot-data", metavar="DIR")
    p.set_defaults(func=cmd_reproduce)
    return parser


def _meta(args) -> dict:
    cfg = {k: (sorted(v) if isinstance(v, frozenset) else v)
           for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}
    meta = {"version": __version__, "command": args.command, "seed": args.seed, "config": cfg}
    if args.timestamp:
        meta["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return meta


def _dataset_info(report, d, label=""):
    info = {"n": d.n, "p": d.p, "centered": d.centered, "columns": list(d.column_names),
            "dropped_columns": list(d.dropped_columns),
            "imputed": {name: k for name, k in d.imputed}}
    report.meta["dataset" + label] = info
    if d.dropped_columns:
        report.warnings.append(f"dataset{label}: dropped dependent predictor columns "
                               f"{list(d.dropped_columns)}")
    for name, k in d.imputed:
        report.warnings.append(f"dataset{label}: imputed {k} missing value(s) in {name!r}")


def _load(args, path):
    return ingest_csv(path, args.response, center=args.center, missing=args.missing)


def _null_for(args, default=None):
    return args.null if args.null is not None else default


def cmd_test(args) -> Report:
    d = _load(args, args.input)
    fit = ols_fit(d)
    report = Report(meta=_meta(args))
    _dataset_info(report, d)
    k, a = args.kind, args.alpha
    if k in ("quad-norm", "conventional"):
        c0 = args.null_norm if args.null_norm is not None else _null_for(args)
        if c0 is None:
            raise ConfigError(f"--kind {k} needs --null-norm (or --null) giving ||beta|| under H0")
        res = (inf.test_quad_norm if k == "quad-norm" else inf.test_conventional)(fit, c0, a)
    elif k == "signal":
        res = inf.test_signal_detection(fit, a)
    elif k == "global":
        b0 = np.zeros(fit.p) if args.null_beta is None else np.asarray(args.null_beta)
        res = inf.test_global(fit, b0, a)
    elif k == "error-variance":
        if args.null is None:
            raise ConfigError("--kind error-variance needs --null (the error variance under H0)")
        res = inf.test_error_variance(fit, args.null, a)
    elif k == "rho":
        if args.null is None:
            raise ConfigError("--kind rho needs --null in (0, 1)")
        res = inf.test_rho(fit, d, args.null, a, conventional=args.conventional)
    elif k == "eta":
        res = inf.ci_eta(fit, d, a, eta_null=_null_for(args, 0.0))
    else:
        if args.contrast is None:
            raise ConfigError("--kind linear needs --contrast")
        res = inf.linear_functional_inference(fit, args.contrast, a, null=_null_for(args, 0.0))
    report.add_result(res)
    return report


def cmd_two_sample(args) -> Report:
    da, db = _load(args, args.input), _load(args, args.input_b)
    if da.p != db.p:
        raise ConfigError(f"datasets have different numbers of predictors after rank repair "
                          f"({da.p} vs {db.p})")
    pair = ts.two_sample_fit(ols_fit(da), ols_fit(db))
    report = Report(meta=_meta(args))
    _dataset_info(report, da, "_a")
    _dataset_info(report, db, "_b")
    if args.kind == "two-sample-equality":
        res = ts.test_equality(pair, args.alpha)
    else:
        res = ts.test_coheritability(pair, args.null, args.alpha, conventional=args.conventional)
    report.add_result(res)
    return report


_SUMMARY_COLS = ("kind", "delta", "replications", "used", "failed", "flagged", "ks_statistic",
                 "ks_p_value", "coverage", "mean_ci_length", "rejection_rate", "estimate_mean",
                 "estimate_var", "estimate_se", "mean_std_error", "median_variance")


def _write_plot_data(outdir, qq=None, power=None, alpha=0.05):
    from . import plotting

    os.makedirs(outdir, exist_ok=True)
    if qq:
        rows = [[label, a, b] for label, pts in qq.items() for a, b in pts]
        with open(os.path.join(outdir, "qq.csv"), "w", newline="") as fh:
            fh.write(table_csv({"columns": ["series", "uniform_quantile", "p_value"],
                                "rows": rows}))
        plotting.qq_figure(qq, os.path.join(outdir, "qq.png"))
    if power:
        rows = [[label, dl, r] for label, (ds, rs) in power.items() for dl, r in zip(ds, rs)]
        with open(os.path.join(outdir, "power.csv"), "w", newline="") as fh:
            fh.write(table_csv({"columns": ["series", "delta", "rejection_rate"],
                                "rows": rows}))
        plotting.power_figure(power, os.path.join(outdir, "power.png"), alpha=alpha)


def cmd_simulate(args) -> Report:
    kinds = tuple(args.kinds or (() if args.power else ("quad-norm",)))
    grid = None
    if args.power:
        if kinds:
            raise ConfigError("--power cannot be combined with --kind/--test")
        grid = args.delta_grid or (SIGNAL_GRID if args.power == "signal" else VARIANCE_GRID)
    elif args.delta_grid:
        raise ConfigError("--delta-grid requires --power")
    cfg = SimConfig(case=args.case, n=args.n, p=args.p, reps=args.reps, seed=args.seed,
                    tests=kinds, alpha=args.alpha, beta=args.beta, beta_norm=args.null_norm,
                    delta_grid=grid, power_kind=args.power, theta0=args.theta0, n_b=args.n_b)
    summary, recs = run_replications(cfg, args.workers, return_records=True)
    report = Report(meta=_meta(args))
    report.meta["truth"] = summary["truth"]
    report.add_table("summary", _SUMMARY_COLS,
                     [[r[c] for c in _SUMMARY_COLS] for r in summary["rows"]])
    for r in summary["rows"]:
        tag = r["kind"] if r["delta"] is None else f"{r['kind']} delta={r['delta']}"
        if r["failed"]:
            report.warnings.append(f"{tag}: {r['failed']} replication(s) failed and were excluded")
        if r["flagged"]:
            report.warnings.append(f"{tag}: {r['flagged']} replication(s) carry diagnostic flags")
    if args.plot_data:
        qq = power = None
        if grid is None:
            qq = {k: qq_points([x.p_value for x in recs if x.kind == k and not x.failed])
                  for k in kinds}
        else:
            power = {args.power: (list(grid), [r["rejection_rate"] for r in summary["rows"]])}
        _write_plot_data(args.plot_data, qq, power, args.alpha)
    return report


def cmd_reproduce(args) -> Report:
    names = tuple(TABLES) if args.table == "all" else (args.table,)
    ns = tuple(args.n or (400,))
    report = Report(meta=_meta(args))
    qq, power = {}, {}
    for name in names:
        kw = {"ns": ns, "reps": args.reps or DEFAULT_REPS[name], "seed": args.seed,
              "alpha": args.alpha, "workers": args.workers}
        if args.case:
            kw["cases"] = tuple(args.case)
        if args.p and name != "power":
            kw["ps"] = tuple(args.p)
        cols, rows, plot = TABLES[name](**kw)
        report.add_table(name, cols, rows)
        qq.update(plot.get("qq", {}))
        power.update(plot.get("power", {}))
    if args.plot_data:
        _write_plot_data(args.plot_data, qq, power, args.alpha)
    return report


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
        text = report.to_json()
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except DegeneracyError as exc:
        print(f"quadinf: numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConfigError as exc:
        print(f"quadinf: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
