"""Command line front end.

Subcommands: fit, report, price, basis, hedge.  Inputs are the CSV/JSON
schemas of the library loaders; outputs are deterministic (no
timestamps, floats written with full round-trip precision).

Exit codes: 0 ok, 2 parse error, 3 insufficient data, 4 missing input,
5 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import calibration, hedging, measures
from .calibration import FitConfig, load_bond_quotes, load_cds_quotes
from .curves import load_base_curve
from .errors import (
    ArbitrageError,
    ConvergenceError,
    CreditCurveError,
    FitError,
    InsufficientDataError,
    ParseError,
    ScheduleError,
)
from .survival import load_survival_curve

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INSUFFICIENT = 3
EXIT_MISSING_INPUT = 4
EXIT_NUMERICAL = 5


class _MissingInput(Exception):
    pass


def _require(path: str | None, label: str) -> str:
    if not path:
        raise _MissingInput(f"{label} required")
    if not os.path.exists(path):
        raise _MissingInput(f"{label} not found: {path}")
    return path


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            # repr of a builtin float is the shortest exact round-trip form
            writer.writerow([cell if isinstance(cell, str) else repr(float(cell))
                             for cell in row])


def _write_json(path: str, payload) -> None:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def _fit_config(args: argparse.Namespace) -> FitConfig:
    kwargs = {"recovery": args.recovery, "weight_scheme": args.weights}
    if args.eta_grid:
        try:
            grid = tuple(float(x) for x in args.eta_grid.split(","))
        except ValueError as exc:
            raise ParseError(f"--eta-grid: {exc}") from exc
        kwargs["eta_grid"] = grid
    return FitConfig(**kwargs)


def _run_fit(args: argparse.Namespace) -> int:
    base = load_base_curve(_require(args.base, "base curve"))
    quotes = load_bond_quotes(_require(args.bonds, "bond quotes"))
    fit = calibration.fit_survival(quotes, base, _fit_config(args))
    os.makedirs(args.out, exist_ok=True)
    fit.curve.save(os.path.join(args.out, "curve.json"))
    by_id = {q.id: q for q in quotes}
    rows = []
    for bond_id, resid, das in zip(fit.ids, fit.residuals, fit.das):
        market = by_id[bond_id].clean_price
        rows.append([bond_id, market, market - resid, float(resid), float(das) * 1e4])
    _write_csv(os.path.join(args.out, "residuals.csv"),
               ["id", "market", "fitted", "residual", "das_bp"], rows)
    _write_json(os.path.join(args.out, "diagnostics.json"), {
        "weighted_error": fit.weighted_error,
        "eta": fit.eta,
        "active_constraints": list(fit.active_constraints),
    })
    return EXIT_OK


def _run_report(args: argparse.Namespace) -> int:
    base = load_base_curve(_require(args.base, "base curve"))
    curve = load_survival_curve(_require(args.curve, "survival curve"))
    report = measures.term_structure_report(base, curve, args.recovery)
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "termstructure.csv"),
               report.csv_header(), report.csv_rows())
    _write_json(os.path.join(args.out, "termstructure.json"), {
        "recovery": report.recovery,
        "columns": report.csv_header(),
        "rows": report.csv_rows(),
    })
    return EXIT_OK


def _run_price(args: argparse.Namespace) -> int:
    base = load_base_curve(_require(args.base, "base curve"))
    curve = load_survival_curve(_require(args.curve, "survival curve"))
    quotes = load_bond_quotes(_require(args.bonds, "bond quotes"))
    rows = []
    records = []
    for q in quotes:
        fitted = measures.fitted_price(q.spec, base, curve, args.recovery)
        das = measures.das(q.spec, q.clean_price, base, curve, args.recovery)
        rows.append([q.id, q.clean_price, fitted, q.clean_price - fitted, das * 1e4])
        records.append({"id": q.id, "market": q.clean_price, "fitted": fitted,
                        "residual": q.clean_price - fitted, "das_bp": das * 1e4})
    os.makedirs(args.out, exist_ok=True)
    if args.format == "json":
        _write_json(os.path.join(args.out, "prices.json"), records)
    else:
        _write_csv(os.path.join(args.out, "prices.csv"),
                   ["id", "market", "fitted", "residual", "das_bp"], rows)
    return EXIT_OK


def _hedge_plans(args: argparse.Namespace, base, curve_cds, quotes, cds_quotes):
    plans = {}
    maturities = [m for m, _ in cds_quotes]
    for q in quotes:
        candidates = sorted({m for m in maturities if m < q.spec.maturity} | {q.spec.maturity})
        plans[q.id] = hedging.coarse_hedge(q.spec, base, curve_cds, args.recovery, candidates)
    return plans


def _run_basis(args: argparse.Namespace) -> int:
    base = load_base_curve(_require(args.base, "base curve"))
    quotes = load_bond_quotes(_require(args.bonds, "bond quotes"))
    if not args.cds:
        raise _MissingInput("CDS quotes required")
    cds_quotes = load_cds_quotes(_require(args.cds, "CDS quotes"))
    curve_cds = calibration.calibrate_from_cds(cds_quotes, base, args.recovery)
    fit = calibration.fit_survival(quotes, base, _fit_config(args))
    plans = _hedge_plans(args, base, curve_cds, quotes, cds_quotes)
    rows = []
    records = []
    for q in quotes:
        bs = hedging.basis_spread(q.spec, q.clean_price, base, curve_cds, args.recovery)
        ab = hedging.approx_basis(q.spec, q.clean_price, base, fit.curve, curve_cds,
                                  args.recovery, plans[q.id])
        rows.append([q.id, bs * 1e4, ab * 1e4])
        records.append({"id": q.id, "basis_spread_bp": bs * 1e4,
                        "approx_basis_bp": ab * 1e4})
    os.makedirs(args.out, exist_ok=True)
    if args.format == "json":
        _write_json(os.path.join(args.out, "basis.json"), records)
    else:
        _write_csv(os.path.join(args.out, "basis.csv"),
                   ["id", "basis_spread_bp", "approx_basis_bp"], rows)
    _write_json(os.path.join(args.out, "hedge_plans.json"),
                {bond_id: plan.to_dict() for bond_id, plan in plans.items()})
    return EXIT_OK


def _run_hedge(args: argparse.Namespace) -> int:
    base = load_base_curve(_require(args.base, "base curve"))
    quotes = load_bond_quotes(_require(args.bonds, "bond quotes"))
    if not args.cds:
        raise _MissingInput("CDS quotes required")
    cds_quotes = load_cds_quotes(_require(args.cds, "CDS quotes"))
    curve_cds = calibration.calibrate_from_cds(cds_quotes, base, args.recovery)
    plans = _hedge_plans(args, base, curve_cds, quotes, cds_quotes)
    os.makedirs(args.out, exist_ok=True)
    _write_json(os.path.join(args.out, "hedge_plans.json"),
                {bond_id: plan.to_dict() for bond_id, plan in plans.items()})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="creditcurves",
        description="Survival-based credit term structure analytics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runners = {
        "fit": ("fit a survival curve to bond prices", _run_fit),
        "report": ("emit the term structure report for a fitted curve", _run_report),
        "price": ("price bonds and compute DAS off a fitted curve", _run_price),
        "basis": ("CDS-bond basis measures and hedge plans", _run_basis),
        "hedge": ("coarse-grained CDS hedge plans per bond", _run_hedge),
    }
    for name, (help_text, runner) in runners.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--base", help="base curve CSV")
        p.add_argument("--bonds", help="bond quotes CSV")
        p.add_argument("--cds", help="CDS quotes CSV")
        p.add_argument("--curve", help="survival curve JSON (report/price)")
        p.add_argument("--recovery", type=float, default=0.40)
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--eta-grid", dest="eta_grid",
                       help="comma-separated decay rates for the fit")
        p.add_argument("--weights", choices=("formula", "prose"), default="formula",
                       help="duration weighting: 1/sqrt(SD) or 1/SD^2")
        p.set_defaults(runner=runner)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if not 0.0 <= args.recovery <= 0.9:
        print("error: --recovery must be in [0, 0.9]", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.runner(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except _MissingInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except (FitError, ConvergenceError, ArbitrageError, ScheduleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (CreditCurveError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
