"""Command line: polarreport --traces <dir> --out <dir> [--figset paper|quick]."""

from __future__ import annotations

import argparse
import sys

from .render import render_report
from .traces import SchemaError, read_trace_dir


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="polarreport", description="Render figures and a markdown summary from trace CSVs."
    )
    parser.add_argument("--traces", required=True, help="directory of trace CSVs + manifests")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--figset", default="paper", choices=("paper", "quick"))
    args = parser.parse_args(argv)
    try:
        runs = read_trace_dir(args.traces)
        written = render_report(runs, args.out, figset=args.figset)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"polarreport: {exc}", file=sys.stderr)
        return 2
    for img in written["images"]:
        print(img)
    print(written["summary"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
