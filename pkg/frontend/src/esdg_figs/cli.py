"""Command line entry point: esdg-figs --in DIR --fig NAME --out FILE."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, PlotSpec, plot
from .io import find_input, load_table


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="esdg-figs", description="render figures from solver CSV outputs"
    )
    ap.add_argument("--in", dest="in_dir", required=True, help="solver output directory")
    ap.add_argument("--fig", required=True, choices=FIGURE_KINDS)
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--columns", help="comma-separated data columns")
    ap.add_argument("--input-file", help="override the conventional CSV name")
    ap.add_argument("--reference", help="reference profile CSV (profile only)")
    ap.add_argument("--xlabel")
    ap.add_argument("--ylabel")
    ap.add_argument("--title")
    ap.add_argument("--xlim", help="comma-separated axis limits")
    ap.add_argument("--ylim", help="comma-separated axis limits")
    ap.add_argument(
        "--guides", help="comma-separated guide-line orders (convergence only)"
    )
    args = ap.parse_args(argv)

    path = args.input_file or find_input(args.in_dir, args.fig)
    try:
        table = load_table(path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    spec = PlotSpec(
        kind=args.fig,
        table=table,
        out_path=args.out,
        columns=tuple(args.columns.split(",")) if args.columns else (),
        reference=load_table(args.reference) if args.reference else None,
        xlabel=args.xlabel,
        ylabel=args.ylabel,
        title=args.title,
        xlim=tuple(float(v) for v in args.xlim.split(",")) if args.xlim else None,
        ylim=tuple(float(v) for v in args.ylim.split(",")) if args.ylim else None,
        guides=tuple(float(v) for v in args.guides.split(",")) if args.guides else (),
    )
    try:
        result = plot(spec)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 1
    if result is not None:
        print(f"peak = {result:.17g}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
