"""Batch plotting CLI for cpbandit CSV artifacts.

``cpbandit-plot sweep --input rows.csv --output fig.png [--overlay bounds.csv]``
``cpbandit-plot bounds --input bounds.csv --output fig.png``

Exits 0 on success, 2 on schema/parse problems, 4 on write failures.
"""

from __future__ import annotations

import argparse
import sys

from .figures import PlotSpec, SchemaError, plot_bounds, plot_sweep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpbandit-plot")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="failure curves with CI bands")
    p_sweep.add_argument("--input", action="append", required=True,
                         help="sweep CSV (repeatable)")
    p_sweep.add_argument("--output", required=True, help="image path (.png)")
    p_sweep.add_argument("--overlay", default=None, help="bounds CSV overlay")
    p_sweep.add_argument("--title", default=None)
    p_sweep.add_argument("--log-x", action="store_true")
    p_sweep.add_argument("--log-y", action="store_true")

    p_bounds = sub.add_parser("bounds", help="bound table on a log-y axis")
    p_bounds.add_argument("--input", required=True, help="bounds CSV")
    p_bounds.add_argument("--output", required=True, help="image path (.png)")
    p_bounds.add_argument("--title", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            spec = PlotSpec(
                inputs=args.input,
                output=args.output,
                overlay=args.overlay,
                title=args.title,
                log_x=args.log_x,
                log_y=args.log_y,
            )
            _, paths = plot_sweep(spec)
        else:
            _, paths = plot_bounds(args.input, args.output, title=args.title)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    for p in paths:
        print(p, file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
