"""render <kind> <input.csv>... <output image> [style options]"""

from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .plots import KINDS, Style, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render experiment CSVs to figures",
    )
    parser.add_argument("kind", choices=sorted(KINDS), help="plot kind")
    parser.add_argument("paths", nargs="+", metavar="path",
                        help="input CSV file(s) followed by the output image path")
    parser.add_argument("--labels", help="comma-separated curve labels")
    parser.add_argument("--xlabel", default="")
    parser.add_argument("--ylabel", default="")
    parser.add_argument("--title", default="")
    parser.add_argument("--cmap", default="viridis")
    parser.add_argument("--linear-color", action="store_true",
                        help="disable the log color scale (histogram2d)")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if len(args.paths) < 2:
        print("error: need at least one input CSV and one output path", file=sys.stderr)
        return 2
    *inputs, output = args.paths
    style = Style(
        labels=args.labels.split(",") if args.labels else [],
        xlabel=args.xlabel,
        ylabel=args.ylabel,
        title=args.title,
        cmap=args.cmap,
        log_color=not args.linear_color,
        dpi=args.dpi,
    )
    try:
        path = render(args.kind, inputs, output, style)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
