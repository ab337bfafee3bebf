"""Command-line entry point: ``curvepoisson <command> [options]``.

Every command writes a JSON envelope (or a CSV table with ``--format csv``)
to ``--out`` or stdout.  Exit codes: 0 success, 2 usage or validation error,
3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from . import __version__
from .census import KINDS, parse_field_spec, run_census, validate_orbits
from .census.distribution import empirical_falling_moments, empirical_raw_moments
from .exactcomb import (
    hilbert_series,
    hilbert_series_from_factors,
    lambda_of_q,
    poisson_pmf_table,
    predicted_falling_moment,
    predicted_moment,
    truncated_hs_ratio,
)
from .rmt import ConstraintConfig, run_experiment, weil_window
from .traceformula import (
    hs_target,
    kprime_search,
    ratio_prediction,
    stable_trace_normalized,
    unstable_tail_exact,
)

SCHEMA_VERSION = "1.0"
DECIMAL_DIGITS = 20

LIMITATION_NOTE = (
    "Gaps between empirical falling moments and lambda^n are reported only. "
    "The large-genus Poisson limit and the regime q > g^K cannot be reached at "
    "desk scale, so no pass/fail judgment is made on these columns."
)


class UsageError(Exception):
    """Invalid parameters; maps to exit code 2."""


def frac(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def decimal(x: Fraction, digits: int = DECIMAL_DIGITS) -> str:
    """Correctly rounded fixed-point rendering of an exact rational."""
    x = Fraction(x)
    scaled = round(x * 10**digits)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    whole, part = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{part:0{digits}d}"


def _exact_entry(x: Fraction, digits: int = DECIMAL_DIGITS) -> dict:
    return {"exact": frac(x), "decimal": decimal(x, digits), "precision": digits}


def _parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def load_schema() -> dict:
    text = resources.files("curvepoisson").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


def validate_envelope(envelope: dict) -> None:
    jsonschema.validate(envelope, load_schema())


# ---------------------------------------------------------------------------
# commands: each returns (parameters, results, csv_rows)
# ---------------------------------------------------------------------------


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


def cmd_predict(args):
    q, n_max, g = args.q, args.n if args.n is not None else 4, args.g if args.g is not None else 2
    _require(q is not None and q >= 2, "predict needs --q >= 2")
    _require(n_max >= 0, "--n must be nonnegative")
    _require(g >= 1, "--g must be at least 1")
    _require(args.precision >= 1, "--precision must be at least 1")
    lam = lambda_of_q(q)
    lo, hi = weil_window(q, g)
    pmf = poisson_pmf_table(lam, hi, precision=args.precision)
    rows = [
        {
            "n": n,
            "raw_moment": _exact_entry(predicted_moment(n, q)),
            "falling_moment": _exact_entry(predicted_falling_moment(n, q)),
        }
        for n in range(1, n_max + 1)
    ]
    pmf_rows = [
        {"N": N, "pmf": pmf[N].to_decimal(args.precision), "radius": float(pmf[N].radius)}
        for N in range(lo, hi + 1)
    ]
    params = {"q": q, "n_max": n_max, "g": g, "precision": args.precision}
    results = {
        "lambda": _exact_entry(lam),
        "moments": rows,
        "pmf_window": [lo, hi],
        "pmf_precision": args.precision,
        "pmf": pmf_rows,
    }
    table = [["n", "raw_moment", "falling_moment"]] + [
        [r["n"], r["raw_moment"]["exact"], r["falling_moment"]["exact"]] for r in rows
    ]
    return params, results, table


def cmd_series(args):
    n = args.n if args.n is not None else 0
    D = args.depth if args.depth is not None else 20
    _require(n >= 0 and D >= 0, "--n and --depth must be nonnegative")
    hs = hilbert_series(n, D)
    factored = hilbert_series_from_factors(n, D)
    coeffs = [int(hs[i]) for i in range(2 * D + 1)]
    params = {"n": n, "depth": D}
    results = {
        "coefficients": coeffs,
        "factor_identity_holds": hs == factored,
        "odd_coefficients_vanish": hs.odd_coefficients_vanish(),
    }
    if args.q is not None:
        _require(args.q >= 2, "--q must be at least 2")
        params["q"] = args.q
        ratio = truncated_hs_ratio(n, args.q, D)
        target = lambda_of_q(args.q) ** n
        results["truncated_ratio"] = _exact_entry(ratio)
        results["lambda_power"] = _exact_entry(target)
        results["ratio_gap"] = _exact_entry(abs(ratio - target))
    table = [["degree", "coefficient"]] + [[i, c] for i, c in enumerate(coeffs)]
    return params, results, table


def cmd_trace(args):
    g_lo = args.g if args.g is not None else 2
    g_hi = args.gmax if args.gmax is not None else g_lo
    n = args.n if args.n is not None else 0
    q = args.q if args.q is not None else 2
    depth = args.depth if args.depth is not None else 400
    _require(g_lo >= 2, "trace needs --g >= 2")
    _require(g_hi >= g_lo, "empty genus range: --gmax must be >= --g")
    _require(n >= 0 and q >= 2, "trace needs --n >= 0 and --q >= 2")
    _require(args.K is None or args.K > 144, "--K must exceed 144")
    target = hs_target(n, q, depth)
    rows = []
    for g in range(g_lo, g_hi + 1):
        stable = stable_trace_normalized(g, n, q)
        rows.append(
            {
                "g": g,
                "stable_normalized": _exact_entry(stable),
                "unstable_tail_exact": _exact_entry(unstable_tail_exact(g, n, q)),
                "ratio_prediction": _exact_entry(ratio_prediction(g, n, q)),
                "gap_to_target": decimal(abs(target - stable)),
            }
        )
    params = {"g": g_lo, "gmax": g_hi, "n": n, "q": q, "depth": depth, "K": args.K}
    results = {
        "rows": rows,
        "hs_target": {**_exact_entry(target), "depth": depth},
        "final_gap": decimal(abs(target - stable_trace_normalized(g_hi, n, q))),
        "lambda_power": _exact_entry(lambda_of_q(q) ** n),
    }
    if args.K is not None:
        rep = kprime_search(args.K, n, g_hi)
        results["kprime"] = {
            "K": rep.K,
            "g_max": rep.g_max,
            "g0": rep.g0,
            "first_satisfied": rep.first_satisfied,
            "checked": rep.checked,
            "violations": rep.violations,
            "intermittent": rep.intermittent,
            "fails_at": rep.fails_at,
        }
    table = [["g", "stable_normalized", "unstable_tail_exact", "ratio_prediction", "gap_to_target"]]
    table += [
        [
            r["g"],
            r["stable_normalized"]["decimal"],
            r["unstable_tail_exact"]["decimal"],
            r["ratio_prediction"]["decimal"],
            r["gap_to_target"],
        ]
        for r in rows
    ]
    return params, results, table


def _constraint_config(args) -> ConstraintConfig:
    if args.no_constraints:
        return ConstraintConfig.none(max_index=args.max_index)
    chosen = args.discreteness or args.positivity or args.more_positivity
    if not chosen:
        return ConstraintConfig(epsilon=args.epsilon, max_index=args.max_index)
    return ConstraintConfig(
        use_discreteness=args.discreteness,
        epsilon=args.epsilon,
        use_positivity=args.positivity,
        use_more_positivity=args.more_positivity,
        max_index=args.max_index,
    )


def cmd_rmt(args):
    _require(args.g is not None and args.g >= 1, "rmt needs --g >= 1")
    _require(args.q is not None and args.q >= 2, "rmt needs --q >= 2")
    _require(args.seed is not None, "rmt needs an explicit --seed")
    _require(args.samples is not None and args.samples >= 1, "rmt needs --samples >= 1")
    _require(args.n is None or args.n >= 1, "--n must be at least 1")
    try:
        config = _constraint_config(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    n_max = args.n if args.n is not None else 4
    report = run_experiment(
        args.g, args.q, config, args.samples, args.seed, n_max=n_max,
        method=args.method, workers=args.workers,
    )
    params = {
        "g": args.g,
        "q": args.q,
        "samples": args.samples,
        "seed": args.seed,
        "n_max": n_max,
        "method": args.method,
        "constraints": config.to_dict(),
    }
    results = report.to_dict()
    results["lambda"] = frac(lambda_of_q(args.q))
    table = [["N", "count"]] + [[k, v] for k, v in sorted(report.histogram.items())]
    return params, results, table


def cmd_census(args):
    _require(args.kind in KINDS, f"--kind must be one of {', '.join(KINDS)}")
    _require(args.field is not None, "census needs --field p^k")
    try:
        F = parse_field_spec(args.field)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    n_max = args.n if args.n is not None else 4
    _require(n_max >= 1, "--n must be at least 1")
    try:
        res = run_census(args.kind, F, n_max=n_max, max_k=4, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    dist = res.distribution
    results = {
        "kind": args.kind,
        "genus": dist.genus,
        "convention": (
            "M_{1,1}: long Weierstrass equations, marked point at infinity"
            if args.kind == "genus1"
            else "M_2: y^2 + h(x) y = f(x), deg h <= 3, deg f <= 6"
        ),
        "field": F.spec(),
        "candidates": res.candidates,
        "smooth_equations": dist.num_equations,
        "group_order": dist.group.order,
        "group_formula": dist.group.formula,
        "masses": {str(n): frac(m) for n, m in dist.masses.items()},
        "total_mass": frac(dist.total_mass),
        "raw_moments": [frac(x) for x in empirical_raw_moments(dist, n_max).as_list()],
        "falling_moments": [frac(x) for x in empirical_falling_moments(dist, n_max).as_list()],
        "falling_moments_direct": [frac(x) for x in res.direct_falling_moments(n_max).as_list()],
        "lambda": frac(lambda_of_q(F.q)),
        "hasse_weil": {"checked": res.hasse_weil_checks, "failed": res.hasse_weil_failures},
        "zeta_consistency": {
            "checked": res.zeta_checks,
            "passed": res.zeta_checks - res.zeta_failures,
        },
        "flags": res.flags,
    }
    if args.orbits:
        v = validate_orbits(args.kind, F)
        results["orbit_validation"] = {
            "group_order": v.group_order,
            "orbits": v.smooth_orbits,
            "orbit_sum": v.orbit_sum,
            "stabilizer_sizes": {str(k): c for k, c in v.stabilizer_sizes.items()},
            "ok": v.ok,
        }
    params = {"kind": args.kind, "field": args.field, "n_max": n_max, "orbits": bool(args.orbits)}
    table = [["N", "equations", "mass"]] + [
        [n, dist.counts[n], frac(m)] for n, m in dist.masses.items()
    ]
    return params, results, table


def _load_report(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"input file not found: {path}")
    try:
        env = json.loads(p.read_text())
        validate_envelope(env)
    except (json.JSONDecodeError, jsonschema.ValidationError) as exc:
        raise UsageError(f"{path} is not a valid report: {exc}") from exc
    if env["command"] not in ("census", "rmt"):
        raise UsageError(f"{path} holds a {env['command']!r} report; expected census or rmt")
    if env["schema_version"] != SCHEMA_VERSION:
        raise UsageError(f"{path} has schema version {env['schema_version']}, need {SCHEMA_VERSION}")
    return env


def _report_q(env: dict) -> int:
    res = env["results"]
    return res["field"]["q"] if env["command"] == "census" else res["q"]


def cmd_report(args):
    _require(args.census is not None and args.rmt is not None, "report needs --census and --rmt")
    left, right = _load_report(args.census), _load_report(args.rmt)
    q = args.q if args.q is not None else _report_q(left)
    _require(q >= 2, "--q must be at least 2")
    for path, env in ((args.census, left), (args.rmt, right)):
        _require(_report_q(env) == q, f"{path} was produced for q={_report_q(env)}, not q={q}")
    lam = lambda_of_q(q)
    a = [_parse_fraction(x) for x in left["results"]["falling_moments"]]
    b = [_parse_fraction(x) for x in right["results"]["falling_moments"]]
    n_max = args.n if args.n is not None else max(len(a), len(b))
    rows = []
    for k in range(1, n_max + 1):
        x = a[k - 1] if k <= len(a) else None
        y = b[k - 1] if k <= len(b) else None
        ref = lam**k

        def gap(u, v):
            return None if u is None or v is None else decimal(abs(u - v))

        rows.append(
            {
                "n": k,
                "census_falling": None if x is None else frac(x),
                "rmt_falling": None if y is None else frac(y),
                "lambda_power": frac(ref),
                "gap_census_lambda": gap(x, ref),
                "gap_rmt_lambda": gap(y, ref),
                "gap_census_rmt": gap(x, y),
            }
        )
    params = {"census": str(args.census), "rmt": str(args.rmt), "q": q, "n_max": n_max}
    results = {
        "lambda": frac(lam),
        "sources": [left["command"], right["command"]],
        "rows": rows,
        "judgment": None,
        "limitation": LIMITATION_NOTE,
    }
    keys = list(rows[0]) if rows else ["n"]
    table = [keys] + [[r[k] if r[k] is not None else "" for k in keys] for r in rows]
    return params, results, table


COMMANDS = {
    "predict": cmd_predict,
    "series": cmd_series,
    "trace": cmd_trace,
    "rmt": cmd_rmt,
    "census": cmd_census,
    "report": cmd_report,
}


# ---------------------------------------------------------------------------
# parser and dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(
        prog="curvepoisson", description="Point-count statistics of random curves over finite fields."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", parents=[common], help="lambda, moments and Poisson PMF")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, help="highest moment order (default 4)")
    p.add_argument("--g", type=int, help="genus for the Weil window of the PMF table (default 2)")
    p.add_argument("--precision", type=int, default=30, help="decimal digits of the PMF")

    p = sub.add_parser("series", parents=[common], help="Hilbert series coefficients")
    p.add_argument("--n", type=int)
    p.add_argument("--depth", type=int, help="truncation D (degrees up to 2D)")
    p.add_argument("--q", type=int, help="also report the truncated ratio at this q")

    p = sub.add_parser("trace", parents=[common], help="stable trace convergence table")
    p.add_argument("--g", type=int, help="first genus (default 2)")
    p.add_argument("--gmax", type=int, help="last genus (default --g)")
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--depth", type=int, help="truncation of the limiting series (default 400)")
    p.add_argument("--K", type=float, help="also run the threshold search up to --gmax")

    p = sub.add_parser("rmt", parents=[common], help="constrained USp(2g) experiment")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, help="highest moment order (default 4)")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--max-index", type=int, default=6, help="m: constraints use N_1..N_m")
    p.add_argument("--method", choices=("matrix", "weyl", "rejection", "metropolis"), default="matrix")
    p.add_argument("--workers", type=int, default=1)
    group = p.add_argument_group("constraints (default: all three)")
    group.add_argument("--no-constraints", action="store_true")
    group.add_argument("--discreteness", action="store_true")
    group.add_argument("--positivity", action="store_true")
    group.add_argument("--more-positivity", action="store_true")

    p = sub.add_parser("census", parents=[common], help="exhaustive curve census")
    p.add_argument("--kind", required=True, help="genus1 or genus2")
    p.add_argument("--field", required=True, help="field as p^k or q")
    p.add_argument("--n", type=int, help="highest moment order (default 4)")
    p.add_argument("--orbits", action="store_true", help="also run orbit-stabilizer validation")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("report", parents=[common], help="empirical vs Poisson moments")
    p.add_argument("--census", required=True, help="first report (census or rmt JSON)")
    p.add_argument("--rmt", required=True, help="second report (rmt or census JSON)")
    p.add_argument("--q", type=int)
    p.add_argument("--n", type=int)
    return parser


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv_text(table) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(table)
    return buf.getvalue()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    workers = getattr(args, "workers", None)
    start = time.perf_counter()
    try:
        if workers is not None and workers < 1:
            raise UsageError("--workers must be at least 1")
        params, results, table = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any other failure is a runtime error
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    envelope = {
        "command": args.command,
        "parameters": params,
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "results": results,
        "execution": {"duration_seconds": time.perf_counter() - start, "workers": workers},
    }
    try:
        validate_envelope(envelope)
    except jsonschema.ValidationError as exc:
        print(f"runtime failure: output does not match schema: {exc.message}", file=sys.stderr)
        return 3
    text = dumps(envelope) if args.format == "json" else _csv_text(table)
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 3
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
