"""Command-line front end: constants tables, verification runs, spectral probes, PDE runs.

Exit status: 0 on success, 1 when a verification or invariant check fails,
2 on invalid configuration, 3 when a computation cannot be completed.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from decimal import Decimal
from typing import Callable, Iterable, Sequence

import numpy as np

from . import constants as C
from . import evolution as E
from . import spectral as S
from . import verifiers as V
from .errors import (ComputeError, ConfigError, HeavyTailError, ParameterOutOfRange,
                     VerificationFailure)
from .fp_models import cauchy_model_for, invgamma_model_for, ou_model, wealth_model
from .quadrature import default_config

SCHEMA_LINE = "# heavytail-ineq schema=1"
EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2, 3

NUMERIC_PARAMS = ("beta", "alpha", "m", "kappa", "p", "lambda", "sigma", "delta", "loc")


# ---------------------------------------------------------------------------
# sweeps and formatting


def parse_sweep(text: str) -> list[float]:
    """``"a:b:step"`` (both ends included) or a comma list of numbers."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ConfigError(f"sweep {text!r} must look like start:stop:step")
            a, b, h = (Decimal(p) for p in parts)
            if h <= 0 or b < a:
                raise ConfigError(f"sweep {text!r} needs step > 0 and stop >= start")
            n = int((b - a) / h)
            # exact decimal arithmetic keeps 0.6:4:0.1 at 35 points
            return [float(a + i * h) for i in range(n + 1)]
        vals = [float(p) for p in text.split(",") if p.strip()]
    except (ArithmeticError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse sweep {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"sweep {text!r} is empty or not finite")
    return vals


def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(rows: Sequence[dict], fmt_name: str, columns: Sequence[str] | None = None) -> str:
    columns = list(columns or (rows[0].keys() if rows else []))
    if fmt_name == "json":
        return json.dumps([{k: _jsonable(r.get(k)) for k in columns} for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(k, "")) for k in columns])
    return buf.getvalue()


def emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def pool_map(fn: Callable, items: Sequence, jobs: int) -> list:
    """Ordered map over ``items`` with up to ``jobs`` worker threads."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _grid(args, names: Iterable[str]) -> list[dict]:
    axes = []
    for name in names:
        raw = getattr(args, name.replace("-", "_"), None)
        if raw is None:
            raise ConfigError(f"--{name} is required")
        axes.append([(name, v) for v in parse_sweep(raw)])
    return [dict(combo) for combo in itertools.product(*axes)]


# ---------------------------------------------------------------------------
# subcommands


def cmd_constants(args) -> int:
    chosen = [name for name in C.CONSTANT_TABLE if getattr(args, name.replace("-", "_"))]
    if len(chosen) != 1:
        raise ConfigError("choose exactly one constant: " + ", ".join("--" + n for n in C.CONSTANT_TABLE))
    name = chosen[0]
    fn, pnames = C.CONSTANT_TABLE[name]
    points = _grid(args, pnames)
    # everything is evaluated before anything is written
    try:
        values = [fn(**pt) for pt in points]
    except ParameterOutOfRange as exc:
        raise ConfigError(str(exc)) from None
    rows = [{**pt, "value": cv.value, "branch": cv.branch.value} for pt, cv in zip(points, values)]
    emit(render(rows, args.format, list(pnames) + ["value", "branch"]), args.out)
    return EXIT_OK


def _catalog_params(args) -> list[dict]:
    fixed = {}
    for key in ("model", "family", "potential"):
        v = getattr(args, key, None)
        if v is not None:
            fixed[key] = v
    if args.zeroed:
        fixed["zeroed"] = True
    axes = []
    for key in NUMERIC_PARAMS:
        raw = getattr(args, key if key != "lambda" else "lam", None)
        if raw is not None:
            axes.append([(key, v) for v in parse_sweep(raw)])
    if not axes and not fixed:
        return []
    return [{**fixed, **dict(c)} for c in itertools.product(*axes)]


def _corpus(name: str) -> list[V.TestFunction]:
    if name in ("default", "all"):
        return list(V.DEFAULT_CORPUS)
    wanted = [s.strip() for s in name.split(",") if s.strip()]
    out = [t for t in V.DEFAULT_CORPUS if t.id in wanted]
    missing = set(wanted) - {t.id for t in out}
    if missing:
        raise ConfigError(f"unknown test functions {sorted(missing)}")
    return out


def _quad(args):
    cfg = default_config()
    kw = {}
    if getattr(args, "rtol", None) is not None:
        kw["rel_tol"] = args.rtol
    if getattr(args, "atol", None) is not None:
        kw["abs_tol"] = args.atol
    if getattr(args, "max_subdivisions", None) is not None:
        kw["max_subdivisions"] = args.max_subdivisions
    return cfg.with_overrides(**kw) if kw else cfg


def _specs_from_args(args) -> list[V.InequalitySpec]:
    ids = []
    for item in args.catalog:
        ids.extend(s.strip() for s in item.split(",") if s.strip())
    if ids == ["all"]:
        ids = list(V.CATALOG)
    for cid in ids:
        if cid not in V.CATALOG:
            raise ConfigError(f"unknown catalog id {cid!r}")
    points = _catalog_params(args)
    specs = []
    try:
        for cid in ids:
            for pt in points or V.DEFAULT_POINTS[cid]:
                specs.append(V.build_spec(cid, pt))
    except (ParameterOutOfRange, TypeError) as exc:
        raise ConfigError(f"inadmissible parameters: {exc}") from None
    return specs


REPORT_COLUMNS = ("spec_id", "fn_id", "lhs", "rhs", "slack", "rel_slack", "quad_err", "verdict")


def cmd_verify(args) -> int:
    specs = _specs_from_args(args)
    corpus = _corpus(args.corpus)
    cfg = _quad(args)
    reports = V.run_corpus(specs, corpus, cfg, jobs=args.jobs)
    emit(render([r.as_row() for r in reports], args.format, REPORT_COLUMNS), args.out)
    counts = V.summarize(reports)
    print(" ".join(f"{k}={v}" for k, v in counts.items()), file=sys.stderr)
    if counts["FAIL"]:
        raise VerificationFailure(f"{counts['FAIL']} inequality checks failed")
    if counts["ERROR"]:
        raise ComputeError(f"{counts['ERROR']} checks could not be evaluated")
    return EXIT_OK


def cmd_spectral(args) -> int:
    betas = parse_sweep(args.beta)
    for b in betas:
        C.chernoff_rho(b)    # validates beta > 1/2 before any work
    if args.n < 65:
        raise ConfigError("--n must be at least 65 cells")
    rows = pool_map(lambda b: S.cauchy_gap_row(b, args.n), betas, args.jobs)
    emit(render(rows, args.format, ("beta", "weight_id", "n", "lambda1", "rho_paper", "gap")), args.out)
    return EXIT_OK


def _evolve_model(args):
    """(model, rho) where ``rho`` is the log-Sobolev rate constant when one is proven."""
    name = args.model
    if name == "ou":
        return ou_model(args.loc or 0.0), 1.0
    if name == "invgamma":
        beta, alpha, m = _need(args, "beta", "alpha", "m")
        model = invgamma_model_for(beta, alpha, m)
        rho = C.lsi_rho_invgamma(beta, alpha, m).value if alpha > 1.0 else None
        return model, rho
    if name == "cauchy":
        beta, alpha = _need(args, "beta", "alpha")
        model = cauchy_model_for(beta, alpha)
        rho = C.lsi_rho_cauchy(beta, alpha).value if 1.0 < alpha < beta else None
        return model, rho
    if name == "wealth":
        sigma, lam = _need(args, "sigma", "lam")
        return wealth_model(sigma, lam, args.delta or 0.0), None
    raise ConfigError(f"unknown evolve model {name!r}; choose ou, invgamma, cauchy, wealth")


def _need(args, *names) -> list[float]:
    out = []
    for n in names:
        v = getattr(args, n)
        if v is None:
            raise ConfigError(f"--{'lambda' if n == 'lam' else n} is required for this model")
        out.append(v)
    return out


def cmd_evolve(args) -> int:
    try:
        model, rho = _evolve_model(args)
    except ParameterOutOfRange as exc:
        raise ConfigError(str(exc)) from None
    overrides = {}
    if args.dt is not None:
        overrides["dt"] = args.dt
    if args.t_end is not None:
        overrides["t_end"] = args.t_end
    overrides["scheme"] = E.Scheme(args.scheme)
    overrides["snapshot_stride"] = args.snapshot_stride
    if args.preset not in E.PRESETS:
        raise ConfigError(f"unknown preset {args.preset!r}")
    res = E.run_preset(model, args.preset, rho, args.n_cells, **overrides)
    tr = res.trace
    rows = [{"t": t, "H": h} for t, h in zip(tr.times, tr.H)]
    emit(render(rows, args.format, ("t", "H")), args.out)

    if args.snapshots_out:
        srows = [{"t": t, "x": x, "f": f} for t, vals in res.snapshots
                 for x, f in zip(res.grid.centers, vals)]
        emit(render(srows, "csv", ("t", "x", "f")), args.snapshots_out)
    checks = {
        "h_theorem": tr.max_increase <= 1e-10,
        "mass_conserved": tr.mass_drift < 1e-10,
    }
    bound = 2.0 * rho if rho else None
    if bound is not None and math.isfinite(tr.fitted_rate):
        checks["rate_bound"] = tr.fitted_rate >= 0.95 * bound
    manifest = {
        "model": model.describe(),
        "preset": args.preset,
        "config": {"n_cells": args.n_cells, "scheme": args.scheme,
                   "dt": float(tr.times[1] - tr.times[0]) if len(tr.times) > 1 else None,
                   "t_end": float(tr.times[-1]), "domain": [float(res.grid.faces[0]), float(res.grid.faces[-1])]},
        "fitted_rate": tr.fitted_rate,
        "r_squared": tr.r_squared,
        "fit_window": list(tr.fit_window),
        "rate_bound": bound,
        "mass_drift": tr.mass_drift,
        "truncated_mass": tr.truncated_mass,
        "max_entropy_increase": tr.max_increase,
        "checks": checks,
    }
    text = json.dumps(manifest, indent=1) + "\n"
    if args.manifest_out:
        emit(text, args.manifest_out)
    else:
        sys.stderr.write(text)
    if not all(checks.values()):
        raise VerificationFailure("invariant checks failed: " + ", ".join(k for k, ok in checks.items() if not ok))
    return EXIT_OK


def cmd_report(args) -> int:
    """Summary of the default sweep: one row per catalog entry, plus constant spot checks."""
    specs = V.default_specs()
    reports = V.run_corpus(specs, None, _quad(args), jobs=args.jobs)
    by_cat: dict[str, dict] = {}
    cat_of = {s.spec_id: s.catalog_id for s in specs}
    for r in reports:
        row = by_cat.setdefault(cat_of[r.spec_id], {"catalog_id": cat_of[r.spec_id], "PASS": 0, "FAIL": 0,
                                                    "VACUOUS": 0, "ERROR": 0, "min_rel_slack": math.inf})
        row[r.verdict.value] += 1
        if r.verdict is V.Verdict.PASS:
            row["min_rel_slack"] = min(row["min_rel_slack"], r.relative_slack)
    rows = [by_cat[c] for c in V.CATALOG if c in by_cat]
    emit(render(rows, args.format, ("catalog_id", "PASS", "FAIL", "VACUOUS", "ERROR", "min_rel_slack")), args.out)
    if any(r["FAIL"] for r in rows):
        raise VerificationFailure("the default sweep has failures")
    if any(r["ERROR"] for r in rows):
        raise ComputeError("the default sweep has errors")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps")


def _quad_flags(p: argparse.ArgumentParser):
    p.add_argument("--rtol", type=float, help="quadrature relative tolerance")
    p.add_argument("--atol", type=float, help="quadrature absolute tolerance")
    p.add_argument("--max-subdivisions", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heavytail-ineq",
                                 description="Weighted functional inequalities for heavy-tailed densities.")
    sub = ap.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("constants", help="tabulate closed-form constants over a sweep")
    for name in C.CONSTANT_TABLE:
        pc.add_argument("--" + name, action="store_true")
    for name in ("beta", "kappa", "alpha", "m"):
        pc.add_argument("--" + name, help="value, comma list or start:stop:step")
    _common(pc)
    pc.set_defaults(func=cmd_constants)

    pv = sub.add_parser("verify", help="check catalog inequalities on a test-function corpus")
    pv.add_argument("--catalog", action="append", required=True,
                    help="catalog id, comma list, or 'all' (repeatable)")
    pv.add_argument("--corpus", default="default", help="'default' or a comma list of function ids")
    for name in NUMERIC_PARAMS:
        dest = "lam" if name == "lambda" else name
        pv.add_argument("--" + name, dest=dest, help="value, comma list or start:stop:step")
    pv.add_argument("--model", help="Fokker-Planck model for CHERNOFF_GENERAL")
    pv.add_argument("--family", help="density family for the general Wirtinger entries")
    pv.add_argument("--potential", help="potential for BRASCAMP_LIEB")
    pv.add_argument("--zeroed", action="store_true", help="median-zeroed Wirtinger form")
    _quad_flags(pv)
    _common(pv)
    pv.set_defaults(func=cmd_verify)

    ps = sub.add_parser("spectral", help="best Chernoff constant for Cauchy-type laws, weight 1+x^2")
    ps.add_argument("--beta", required=True)
    ps.add_argument("--n", type=int, default=2048, help="number of cells")
    _common(ps)
    ps.set_defaults(func=cmd_spectral)

    pe = sub.add_parser("evolve", help="evolve a Fokker-Planck model and fit the entropy decay")
    pe.add_argument("--model", required=True, choices=("ou", "invgamma", "cauchy", "wealth"))
    for name in ("beta", "alpha", "m", "sigma", "delta", "loc"):
        pe.add_argument("--" + name, type=float)
    pe.add_argument("--lambda", dest="lam", type=float)
    pe.add_argument("--preset", default="bump", help="one of " + ", ".join(E.PRESETS))
    pe.add_argument("--n-cells", type=int, default=512)
    pe.add_argument("--dt", type=float)
    pe.add_argument("--t-end", type=float)
    pe.add_argument("--scheme", default="ChangCooper", choices=[s.value for s in E.Scheme])
    pe.add_argument("--snapshot-stride", type=int, default=0)
    pe.add_argument("--snapshots-out")
    pe.add_argument("--manifest-out")
    _common(pe)
    pe.set_defaults(func=cmd_evolve)

    pr = sub.add_parser("report", help="per-catalog summary of the default soundness sweep")
    _quad_flags(pr)
    _common(pr)
    pr.set_defaults(func=cmd_report)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if getattr(args, "jobs", 1) < 1:
            raise ConfigError("--jobs must be at least 1")
        return args.func(args)
    except VerificationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ConfigError, ParameterOutOfRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ComputeError, HeavyTailError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
