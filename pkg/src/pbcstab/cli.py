"""Command-line front end.

Subcommands:

  validate FILE            check the Metzler validity of a system file
  analyze FILE             run the optimality tests on (system, control)
  search FILE              grid-search destabilizing bang-bang controls
  reproduce {ex2,ex4,ex5}  re-run a built-in benchmark against its
                           expected values

Exit codes: 0 success, 1 unreadable/unparsable input, 2 invalid system,
3 non-simple Perron root, 4 search budget exhausted, 5 benchmark
mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys
from pathlib import Path

import numpy as np

from . import catalog, figures, first_order, high_order, search
from .linalg import NotSimple
from .model import (BangBangControl, PiecewiseConstantControl,
                    control_to_dict, load_document, validate)
from .search import BudgetExceeded

BUDGET_ENV = "PBCS_EVAL_BUDGET"


def _budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(float(raw)) if raw else search.DEFAULT_BUDGET


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _load(path):
    try:
        return load_document(path)
    except (OSError, json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        print(f"error: cannot read system file: {exc}", file=_sys.stderr)
        raise SystemExit(1)


def cmd_validate(args) -> int:
    sys_, _ = _load(args.input)
    report = validate(sys_)
    _emit({"valid": report.valid,
           "metzler_plus": report.metzler_plus,
           "metzler_minus": report.metzler_minus,
           "messages": list(report.messages)})
    return 0 if report.valid else 2


def _is_zero_control(u) -> bool:
    return (isinstance(u, PiecewiseConstantControl)
            and all(v == 0.0 for v in u.values))


def cmd_analyze(args) -> int:
    sys_, u = _load(args.input)
    if u is None:
        print("error: system file carries no control", file=_sys.stderr)
        return 1
    report = validate(sys_)
    if not report.valid:
        _emit({"valid": False, "messages": list(report.messages)})
        return 2

    grid = first_order.default_grid(sys_, u, args.grid)
    try:
        adj = first_order.adjoint_data(sys_, u, [0.0, sys_.T])
        mp_report = first_order.check_first_order(sys_, u, grid)
        samples = first_order.switching_function(sys_, u, grid)

        bundle = {
            "system": {"A": sys_.A.tolist(), "B": sys_.B.tolist(), "T": sys_.T},
            "control": control_to_dict(u),
            "perron": {
                "rho": adj.perron.rho,
                "v": adj.perron.v.tolist(),
                "w": adj.perron.w.tolist(),
                "gap": adj.perron.gap,
            },
            "first_order": {
                "verdict": mp_report.verdict,
                "max_abs_m": mp_report.max_abs_m,
                "scale": mp_report.scale,
                "periodicity_residual": mp_report.periodicity_residual,
                "switch_residuals": list(mp_report.switch_residuals),
                "violation_margin": mp_report.violation_margin,
            },
        }

        if _is_zero_control(u):
            bundle["high_order"] = high_order.singular_result_to_dict(
                high_order.singular_test(sys_))
        elif isinstance(u, BangBangControl) and u.num_arcs >= 2:
            decomp = high_order.build_H(sys_, u)
            bundle["high_order"] = high_order.second_order_result_to_dict(
                high_order.second_order_test(decomp))
    except NotSimple as exc:
        print(f"error: the first-order test requires a simple Perron root "
              f"of C(T, u): {exc}", file=_sys.stderr)
        return 3

    if args.csv:
        first_order.write_csv(samples, args.csv)
        bundle["csv"] = str(args.csv)
        switch_ts = np.cumsum([d for d, _ in u.arcs(sys_.T)])[:-1]
        fig_path = str(Path(args.csv).with_suffix(".png"))
        figures.switching_function_figure(samples, fig_path, switch_ts)
        bundle["figure"] = fig_path
    _emit(bundle)
    return 0


def cmd_search(args) -> int:
    sys_, _ = _load(args.input)
    report = validate(sys_)
    if not report.valid:
        _emit({"valid": False, "messages": list(report.messages)})
        return 2
    budget = _budget()
    try:
        if args.horizons:
            horizons = [float(t) for t in args.horizons.split(",")]
            verdict = search.rho_t_curve(sys_, horizons, args.arcs,
                                         args.grid, budget)
            out = {
                "status": verdict.status,
                "curve": [[t, r] for t, r in verdict.curve],
            }
            if verdict.witness is not None:
                out["witness"] = control_to_dict(verdict.witness)
                out["witness_horizon"] = verdict.witness_horizon
                out["witness_rho"] = verdict.witness_rho
            if args.csv:
                with open(args.csv, "w") as fh:
                    fh.write("t,rho_root\n")
                    for t, r in verdict.curve:
                        fh.write(f"{t:.17g},{r:.17g}\n")
                out["csv"] = str(args.csv)
                fig_path = str(Path(args.csv).with_suffix(".png"))
                figures.rho_curve_figure(verdict.curve, fig_path)
                out["figure"] = fig_path
            _emit(out)
        else:
            result = search.grid_search(sys_, args.arcs, args.grid, budget)
            if args.refine:
                result = search.refine(sys_, result.best_control)
            _emit({
                "best_control": control_to_dict(result.best_control),
                "best_rho": result.best_rho,
                "evaluations": result.evaluations,
                "trace": list(result.trace),
            })
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 4
    return 0


def cmd_reproduce(args) -> int:
    rows = catalog.REPRODUCERS[args.case]()
    width = max(len(r.name) for r in rows)
    ok = True
    for row in rows:
        status = "pass" if row.passed else "FAIL"
        ok = ok and row.passed
        print(f"{status}  {row.name:<{width}}  value={row.value:.12g}  "
              f"expected={row.expected:.12g}  tol={row.tol:g}")
    print(f"{'all checks passed' if ok else 'MISMATCH'} ({args.case})")
    return 0 if ok else 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pbcstab",
        description="Optimality tests and destabilization search for "
                    "positive bilinear control systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check Metzler validity of a system")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="run the optimality tests")
    p.add_argument("input")
    p.add_argument("--grid", type=int, default=first_order.DEFAULT_GRID,
                   help="number of uniform time samples")
    p.add_argument("--csv", help="write (t, m(t)) samples here; a figure "
                                 "with the same stem is rendered alongside")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("search", help="search for destabilizing controls")
    p.add_argument("input")
    p.add_argument("--arcs", type=int, default=2, help="bang arc count")
    p.add_argument("--grid", type=int, default=9,
                   help="switch-time grid points over [0, T]")
    p.add_argument("--horizons",
                   help="comma-separated horizons; runs the per-horizon "
                        "instability scan instead of a single search")
    p.add_argument("--refine", action="store_true",
                   help="polish the grid optimum by hill climbing")
    p.add_argument("--csv", help="write the (t, rho_t^(1/t)) curve here; a "
                                 "figure with the same stem is rendered "
                                 "alongside")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("reproduce", help="re-run a built-in benchmark")
    p.add_argument("case", choices=catalog.CASE_NAMES)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
