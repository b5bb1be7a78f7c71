"""Command line interface.

Exit codes: 0 success, 1 input error, 2 failed identity check or other
numerical pathology.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .analysis import (
    EMIT_CHOICES,
    AnalysisConfig,
    analyze_dataset,
    atomic_write,
    load_dataset,
    prepare_dataset,
    write_outputs,
)
from .errors import InputError, NumericalError
from .ingest import load_distance_matrix
from .models import ROUTES
from .scatterplot import emit_csv, emit_svg
from .synthetic import random_instance
from .weights import weights_from_distances, write_weight_matrix

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _add_inputs(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--values", metavar="PATH", required=required,
                   help="attribute CSV: id,<col1>,<col2>,...")
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--distances", metavar="PATH", help="square distance CSV")
    src.add_argument("--weights", metavar="PATH",
                     help="precomputed globally normalized weight CSV (same layout)")
    p.add_argument("--column", help="attribute column (optional when the table has one)")
    p.add_argument("--log", action="store_true", help="natural log before standardizing")
    p.add_argument("--routes", type=_csv_list, default=ROUTES,
                   help=f"comma list from {','.join(ROUTES)} (default: all)")
    p.add_argument("--getis", action="store_true", help="also compute the Getis-Ord index")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moranlab",
        description="Moran's index via quadratic forms, autocorrelation models and bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full pipeline with report.json, scatter.csv, scatter.svg")
    _add_inputs(p)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--emit", type=_csv_list, default=EMIT_CHOICES,
                   help="comma list from json,csv,svg (default: all)")
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=640)

    p = sub.add_parser("verify", help="print every identity with its residual and PASS/FAIL")
    _add_inputs(p, required=False)
    p.add_argument("--random", action="store_true", help="verify a seeded random instance")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n", type=int, default=10, help="city count for --random")

    p = sub.add_parser("bounds", help="print the three bound sets for I")
    _add_inputs(p)

    p = sub.add_parser("weights", help="write the normalized weight matrix as CSV")
    p.add_argument("--distances", metavar="PATH", required=True)
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")

    p = sub.add_parser("plot", help="scatterplot CSV and SVG only")
    _add_inputs(p)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=640)
    return parser


def _config(args: argparse.Namespace, **extra) -> AnalysisConfig:
    return AnalysisConfig(
        attribute_path=args.values,
        distance_path=args.distances,
        weights_path=args.weights,
        column=args.column,
        log_transform=args.log,
        routes=tuple(args.routes),
        getis=args.getis,
        **extra,
    )


def _fmt_interval(iv) -> str:
    return f"[{iv[0]:.10g}, {iv[1]:.10g}]"


def cmd_analyze(args) -> int:
    config = _config(args, output_dir=args.out, emit=tuple(args.emit),
                     svg_width=args.width, svg_height=args.height)
    ds = load_dataset(config)
    a = analyze_dataset(ds, config.routes, getis=config.getis)
    written = write_outputs(a, config)
    print(f"n = {ds.z.n}  I = {a.moran.index:.10g}  a = (Wz)'o = {a.moran.lag_sum:.10g}")
    for path in written:
        print(f"wrote {path}")
    failed = [c.name for c in a.checks if not c.passed]
    if failed:
        print(f"identity checks failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _print_checks(a) -> None:
    for c in a.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}  {c.name:<14} residual={c.residual:.3e}  {c.description}")


def cmd_verify(args) -> int:
    if args.random:
        if args.n < 3:
            raise InputError("--n must be at least 3")
        table, dist = random_instance(args.n, args.seed)
        ds = prepare_dataset(table, "x", args.log, distances=dist)
        print(f"random instance: n={args.n}, seed={args.seed}")
        getis = True
        routes = tuple(args.routes)
        unknown = [r for r in routes if r not in ROUTES]
        if unknown or not routes:
            raise InputError(f"unknown route(s) {unknown}; choose from {', '.join(ROUTES)}")
    else:
        config = _config(args)
        ds = load_dataset(config)
        getis, routes = config.getis, config.routes
    a = analyze_dataset(ds, routes, getis=getis)
    _print_checks(a)
    return EXIT_OK if a.all_pass else EXIT_NUMERIC


def cmd_bounds(args) -> int:
    config = _config(args)
    ds = load_dataset(config)
    a = analyze_dataset(ds, config.routes)
    b = a.bounds
    pos = b.position()
    print(f"I = {b.index:.10g}")
    print(f"set1 (eigenvalues of nW):          {_fmt_interval(b.set1)}  I: {pos['set1']}")
    print(f"set2 (eigenvalues of (nW)'(nW)):   {_fmt_interval(b.set2)}  "
          f"I^2+((Wz)'o)^2+sigma_e^2 = {b.set2_quantity:.10g}: {pos['set2']}")
    print(f"set3 (eigenvalues of nW'zz'W):     {_fmt_interval(b.set3)}  "
          f"I^2 = {b.set3_quantity:.10g}: {pos['set3']}")
    print(f"intersection interval for I:       {_fmt_interval(b.intersection_interval_for_I)}")
    ok = all(b.satisfied.values())
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_weights(args) -> int:
    d = load_distance_matrix(args.distances)
    w = weights_from_distances(d)
    if args.out is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["id", *d.ids])
        for uid, row in zip(d.ids, w.w):
            writer.writerow([uid, *(repr(float(v)) for v in row)])
    else:
        atomic_write(Path(args.out), lambda p: write_weight_matrix(w, p, d.ids))
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_plot(args) -> int:
    config = _config(args, output_dir=args.out, emit=("csv", "svg"),
                     svg_width=args.width, svg_height=args.height)
    ds = load_dataset(config)
    a = analyze_dataset(ds, config.routes)
    out = Path(args.out)
    atomic_write(out / "scatter.csv", lambda p: emit_csv(a.scatter, p))
    atomic_write(out / "scatter.svg", lambda p: emit_svg(a.scatter, p, args.width, args.height))
    print(f"wrote {out / 'scatter.csv'}\nwrote {out / 'scatter.svg'}")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "bounds": cmd_bounds,
    "weights": cmd_weights,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
