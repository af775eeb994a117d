"""Command-line panel rendering from sweep CSVs."""

from __future__ import annotations

import argparse
import sys

from .render import render
from .schemas import SchemaError
from .spec import FigureSpec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantos-figures",
        description="Render one figure panel from sweep CSV output.",
    )
    subs = parser.add_subparsers(dest="kind", required=True)

    def common(p, multi_data=False):
        p.add_argument("--data", action="append", required=True,
                       metavar="CSV",
                       help="input data CSV" +
                            (", repeatable for several series"
                             if multi_data else ""))
        p.add_argument("--output", required=True, metavar="IMG",
                       help="output image path (.pdf, .png, ...)")
        p.add_argument("--x-scale", choices=("linear", "log"))
        p.add_argument("--y-scale", choices=("linear", "log"))

    p = subs.add_parser("scaling", help="information vs mode number")
    common(p, multi_data=True)
    p.add_argument("--fit", action="append", default=[], metavar="CSV",
                   help="fit.csv overlay, repeatable")
    p.add_argument("--label-by", metavar="COLUMN",
                   help="column used to label multiple series")

    p = subs.add_parser("phase-heatmap", help="winding number over (t1, t2)")
    common(p)

    p = subs.add_parser("alpha-vs-t1", help="growth rate vs coupling")
    common(p)
    p.add_argument("--classical", action="append", default=[], metavar="CSV",
                   help="classical.csv for the inset, repeatable")

    p = subs.add_parser("fisher-vs-omega", help="information vs frequency")
    common(p)

    p = subs.add_parser("classical-inset", help="classical rate vs coupling")
    common(p, multi_data=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        inputs=tuple(args.data),
        output=args.output,
        fits=tuple(getattr(args, "fit", ())),
        insets=tuple(getattr(args, "classical", ())),
        label_by=getattr(args, "label_by", None),
        x_scale=args.x_scale,
        y_scale=args.y_scale,
    )
    try:
        render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
