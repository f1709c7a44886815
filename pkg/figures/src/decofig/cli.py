"""Command-line entry point: render figures from artifact directories."""

import argparse
import dataclasses
import sys
from pathlib import Path

from .errors import EmptyInput, SchemaMismatch, SpecError
from .render import render
from .spec import DEFAULT_FORMAT, KINDS, load_spec


def parse_args(argv=None):
    parser = argparse.ArgumentParser(
        prog="decofig",
        description="Render simulation CSV/JSON artifacts into figures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    render_p = sub.add_parser("render", help="render one figure from a spec file")
    render_p.add_argument("--spec", required=True, help="figure spec (JSON or YAML)")
    render_p.add_argument(
        "--base-dir",
        default=None,
        help="directory input globs and the output path resolve against"
        " (default: the spec file's directory)",
    )
    render_p.add_argument("--out", default=None, help="override the spec's output path")

    sub.add_parser("kinds", help="list figure kinds and their default formats")
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    if args.command == "kinds":
        for kind in KINDS:
            print(f"{kind}: default format {DEFAULT_FORMAT[kind]}")
        return 0
    try:
        spec = load_spec(args.spec)
        if args.out is not None:
            spec = dataclasses.replace(spec, out=args.out)
        base = args.base_dir if args.base_dir is not None else Path(args.spec).parent
        result = render(spec, base_dir=base)
    except (SpecError, SchemaMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EmptyInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(result.path)
    for key in sorted(result.annotations):
        print(f"  {key} = {result.annotations[key]:.12g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
