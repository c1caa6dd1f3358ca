"""Command line for rendering figures from henon artifacts.

    henon-render --kind scan --in out/scan.csv --in out/degeneracy.json \
                 --out scan.svg

Inputs are self-describing (every artifact declares its kind), so they may
be passed in any order.  Exit codes: 0 success, 1 usage, 2 bad input data.
"""

from __future__ import annotations

import argparse
import sys

from .io import MissingColumnsError, SchemaMismatchError
from .render import KINDS, FigureSpec, render

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="henon-render", description=__doc__)
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        metavar="FILE", help="input artifact (repeatable)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--dpi", type=int, default=144)
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        inputs=tuple(args.inputs),
        out=args.out,
        dpi=args.dpi,
        title=args.title,
    )
    try:
        render(spec)
    except (SchemaMismatchError, MissingColumnsError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(f"wrote {args.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
