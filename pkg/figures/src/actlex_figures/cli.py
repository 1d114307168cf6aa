"""`figures <kind> --in <files> --out <file>` command-line entry point."""

from __future__ import annotations

import argparse
import sys

from .render import RENDERERS, SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="render actlex experiment outputs as figures",
    )
    parser.add_argument("kind", choices=sorted(RENDERERS))
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV/JSON file(s) from the actlex CLI")
    parser.add_argument("--out", required=True, help="output image path (.png)")
    parser.add_argument("--title", default="")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        RENDERERS[args.kind](args.inputs, args.out, title=args.title)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"figures {args.kind}: {exc}", file=sys.stderr)
        return 2
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
