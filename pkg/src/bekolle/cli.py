"""Command-line front end.

One subcommand per experiment: box characteristics, the sharpness sweep,
kernel domination, the iteration checks, and the coherence angle.  Each
writes a single delimited table to stdout (CSV by default, JSON with
--format json), keeps diagnostics on stderr, and exits 0 exactly when all
asserted bounds passed.  --figures DIR additionally renders the matching
plot into DIR.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from .experiments import (
    DEFAULT_DELTAS,
    angle_formula,
    angle_threshold,
    delta_sweep,
    domination_experiment,
    fit_power_law,
    span_violations,
)
from .extrapolation import config_for, rdf_algorithm
from .geometry import GridWindow
from .measure import AlphaMeasure, Exponents
from .operators import weight_tiles
from .tiles import GridLayout, TileFunction
from .weights import (
    BoxFamily,
    TileTableWeight,
    bekolle_constant,
    bekolle_report,
    parse_weight,
)

__all__ = ["main"]


# ---------------------------------------------------------------------------
# Output plumbing
# ---------------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit(columns: list[str], rows: list[dict], fmt: str, extra: dict | None = None):
    """Write the table to stdout: CSV with a header row and full round-trip
    float precision, or a JSON object mirroring the column names."""
    if fmt == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[c]) for c in columns])
        for key, val in (extra or {}).items():
            print(f"{key}: {val}", file=sys.stderr)
    else:
        payload = {"columns": columns, "rows": rows}
        if extra:
            payload.update(extra)
        json.dump(payload, sys.stdout, indent=2, default=str)
        sys.stdout.write("\n")


def _figdir(args) -> Path | None:
    if args.figures is None:
        return None
    out = Path(args.figures)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_window(text: str, j_min: int, j_max: int) -> GridWindow:
    lo, _, hi = text.partition(":")
    try:
        return GridWindow(j_min, j_max, float(lo), float(hi))
    except ValueError as exc:
        raise SystemExit(f"bad --window {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_constant(args) -> int:
    w = parse_weight(args.weight)
    window = _parse_window(args.window, args.jmin, args.jmax)
    mu = AlphaMeasure(args.alpha)
    e = Exponents(args.p)
    t_lo, t_hi = math.ldexp(1.0, args.jmin), math.ldexp(1.0, args.jmax)
    if args.family == "dyadic":
        fam = BoxFamily.dyadic(window)
    elif args.family == "centered":
        fam = BoxFamily.centered(t_lo, t_hi)
    else:
        fam = BoxFamily.dyadic_and_centered(window, t_lo, t_hi)
    rep = bekolle_report(w, e, mu, fam)
    ok = rep.value >= 1.0 - 1e-9
    _emit(
        ["bekolle", "worst_lo", "worst_hi", "searched"],
        [
            {
                "bekolle": rep.value,
                "worst_lo": rep.worst.left,
                "worst_hi": rep.worst.right,
                "searched": rep.searched,
            }
        ],
        args.format,
        extra={"pass": ok},
    )
    figs = _figdir(args)
    if figs is not None:
        from .plots import constant_figure

        print(
            f"figure: {constant_figure(rep, w.spec_string(), figs / 'constant.png')}",
            file=sys.stderr,
        )
    return 0 if ok else 1


def _cmd_sweep(args) -> int:
    deltas = [float(t) for t in args.deltas.split(",") if t.strip()]
    recs = delta_sweep(args.p, args.alpha, deltas)
    inv = [1.0 / r.delta for r in recs]
    fits = {
        "bekolle": fit_power_law(inv, [r.bekolle for r in recs]),
        "ratio": fit_power_law(inv, [r.ratio for r in recs]),
    }
    target_b = args.p - 1.0
    ok_b = abs(fits["bekolle"].slope - target_b) <= 0.1 * target_b
    ok_r = abs(fits["ratio"].slope - 1.0) <= 0.1
    rows = [
        {
            "delta": r.delta,
            "bekolle": r.bekolle,
            "f_norm": r.f_norm,
            "pf_norm": r.pf_norm,
            "ratio": r.ratio,
        }
        for r in recs
    ]
    extra = {
        "bekolle_slope": fits["bekolle"].slope,
        "bekolle_slope_target": target_b,
        "ratio_slope": fits["ratio"].slope,
        "ratio_slope_target": 1.0,
        "pass": ok_b and ok_r,
    }
    if args.format == "json":
        extra = {
            "fits": {
                k: {"slope": f.slope, "intercept": f.intercept, "r_squared": f.r_squared}
                for k, f in fits.items()
            },
            "pass": ok_b and ok_r,
        }
    _emit(["delta", "bekolle", "f_norm", "pf_norm", "ratio"], rows, args.format, extra)
    figs = _figdir(args)
    if figs is not None:
        from .plots import sweep_figure

        print(f"figure: {sweep_figure(recs, figs / 'sweep.png', fits)}", file=sys.stderr)
    return 0 if ok_b and ok_r else 1


def _cmd_dominate(args) -> int:
    seed = args.seed
    if seed is None:
        seed = 0 if args.deterministic else None
    rep = domination_experiment(args.alpha, args.samples, seed=seed)
    _emit(
        ["empirical_constant", "bound", "pass"],
        [
            {
                "empirical_constant": rep.empirical_constant,
                "bound": rep.bound,
                "pass": rep.passed,
            }
        ],
        args.format,
    )
    figs = _figdir(args)
    if figs is not None:
        from .plots import domination_figure

        print(
            f"figure: {domination_figure(rep, figs / 'dominate.png')}", file=sys.stderr
        )
    return 0 if rep.passed else 1


def _cmd_extrapolate(args) -> int:
    if args.p <= 2.0:
        raise SystemExit("extrapolate requires --p > 2 (the iteration divides by p-2)")
    w = parse_weight(args.weight)
    mu = AlphaMeasure(args.alpha)
    window = GridWindow(-8, 3, -2.0, 2.0)
    layout = GridLayout(0.0, window)
    h = TileFunction.sample(layout, lambda x, y: 1.0 / (1.0 + x * x + y * y))
    cfg = config_for(h, w, args.p, mu, truncation=args.trunc)
    dh = rdf_algorithm(h, w, cfg, mu)
    wt = weight_tiles(w, layout)
    q = cfg.control_exponent
    lhs1 = (h * dh**-1.0).max_value()
    lhs2 = dh.norm_lp(q, mu, weight=wt) / h.norm_lp(q, mu, weight=wt)
    fam = BoxFamily.dyadic(window)
    b2 = bekolle_constant(TileTableWeight(dh * wt), Exponents(2.0), mu, fam)
    bp = bekolle_constant(w, Exponents(args.p), mu, fam)
    rows = [
        {"property": "majorant", "lhs": lhs1, "rhs": 1.0, "pass": lhs1 <= 1.0 + 1e-12},
        {
            "property": "norm_double",
            "lhs": lhs2,
            "rhs": 2.0,
            "pass": lhs2 <= 2.0 * (1.0 + 1e-6),
        },
        {
            "property": "characteristic_control",
            "lhs": b2,
            "rhs": bp,
            "pass": math.isfinite(b2 / bp),
        },
    ]
    ok = all(r["pass"] for r in rows)
    _emit(
        ["property", "lhs", "rhs", "pass"],
        rows,
        args.format,
        extra={"control_quotient": b2 / bp, "divisor": cfg.norm_bound},
    )
    figs = _figdir(args)
    if figs is not None:
        from .plots import extrapolation_figure

        print(
            f"figure: {extrapolation_figure(rows, figs / 'extrapolate.png')}",
            file=sys.stderr,
        )
    return 0 if ok else 1


def _cmd_angle(args) -> int:
    measured = angle_threshold(args.alpha, args.samples)
    formula = angle_formula(args.alpha)
    bad = span_violations(args.alpha, measured, args.fresh, seed=args.seed or 1)
    _emit(
        ["measured_M", "formula_M"],
        [{"measured_M": measured, "formula_M": formula}],
        args.format,
        extra={"fresh_samples": args.fresh, "violations": bad},
    )
    figs = _figdir(args)
    if figs is not None:
        from .plots import angle_figure

        print(
            f"figure: {angle_figure(args.alpha, measured, formula, figs / 'angle.png')}",
            file=sys.stderr,
        )
    return 0 if bad == 0 else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bekolle",
        description="Weighted-projection experiments: box characteristics, "
        "sharpness sweeps, kernel domination, iteration checks, coherence angle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument(
        "--figures", metavar="DIR", default=None, help="render plots into DIR"
    )
    common.add_argument(
        "--deterministic",
        action="store_true",
        help="fix sampling seeds for bit-reproducible output",
    )

    p = sub.add_parser("constant", parents=[common], help="box characteristic of a weight")
    p.add_argument("--weight", required=True, help="constant:c=.. | power:gamma=.. | step:a=..,b=.. | table:path=..")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--family", choices=("dyadic", "centered", "both"), default="both")
    p.add_argument("--jmin", type=int, default=-8)
    p.add_argument("--jmax", type=int, default=3)
    p.add_argument("--window", default="-2:2", metavar="LO:HI")
    p.set_defaults(func=_cmd_constant)

    p = sub.add_parser("sweep", parents=[common], help="sharpness sweep over delta")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument(
        "--deltas",
        default=",".join(repr(d) for d in DEFAULT_DELTAS),
        help="comma-separated delta ladder",
    )
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("dominate", parents=[common], help="kernel domination experiment")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_dominate)

    p = sub.add_parser("extrapolate", parents=[common], help="iteration property report")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--trunc", type=int, default=40)
    p.set_defaults(func=_cmd_extrapolate)

    p = sub.add_parser("angle", parents=[common], help="coherence radius measurement")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--fresh", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_angle)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
