"""Command-line entry point.

Subcommands:
  run           execute one experiment from a preset or a config file
  sweep         execute every config file in a directory
  verify        quick self-checks (suites: theorems, polar, gradients)
  list-presets  print all known preset names

Exit codes: 0 success; 2 configuration error; 3 divergence or aborted run;
4 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import verify as verify_mod
from .harness import export_config, list_presets, parse_config, preset, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_VERIFY = 4


def _cmd_run(args) -> int:
    if bool(args.preset) == bool(args.config):
        print("run: give exactly one of --preset or --config", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.preset:
            cfg = preset(args.preset, seed=args.seed)
        else:
            cfg = parse_config(Path(args.config).read_text())
    except (KeyError, ValueError, OSError) as exc:
        print(f"run: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.export_config:
        print(export_config(cfg), end="")
        return EXIT_OK
    result = run_experiment(cfg, out_dir=args.out)
    gap = "" if result.final_gap is None else f" gap={result.final_gap:.6e}"
    print(f"{cfg.label}: status={result.status} final_loss={result.final_loss:.6e}{gap}")
    if result.trace_path:
        print(f"trace: {result.trace_path}\nmanifest: {result.manifest_path}")
    return EXIT_OK if result.status == "ok" else EXIT_DIVERGED


def _cmd_sweep(args) -> int:
    cfg_dir = Path(args.dir)
    files = sorted(cfg_dir.glob("*.cfg")) + sorted(cfg_dir.glob("*.txt"))
    if not files:
        print(f"sweep: no .cfg or .txt config files in {cfg_dir}", file=sys.stderr)
        return EXIT_CONFIG
    worst = EXIT_OK
    for f in files:
        try:
            cfg = parse_config(f.read_text())
        except ValueError as exc:
            print(f"{f.name}: config error: {exc}", file=sys.stderr)
            worst = max(worst, EXIT_CONFIG)
            continue
        result = run_experiment(cfg, out_dir=args.out)
        print(f"{f.name}: {cfg.label} status={result.status} final_loss={result.final_loss}")
        if result.status != "ok":
            worst = max(worst, EXIT_DIVERGED)
    return worst


def _cmd_verify(args) -> int:
    suites = {
        "theorems": verify_mod.verify_theorems,
        "polar": verify_mod.verify_polar,
        "gradients": verify_mod.verify_gradients,
    }
    if args.suite not in suites:
        print(f"verify: unknown suite {args.suite!r} (choose from {sorted(suites)})", file=sys.stderr)
        return EXIT_CONFIG
    ok = suites[args.suite]()
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_list_presets(_args) -> int:
    for name in list_presets():
        print(name)
    return EXIT_OK


def main(argv=None) -> int:
    np.seterr(over="ignore", invalid="ignore")  # divergence is data, not a crash
    parser = argparse.ArgumentParser(prog="polaropt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    p_run.add_argument("--preset", help="preset name (see list-presets)")
    p_run.add_argument("--config", help="path to a flat key-value config file")
    p_run.add_argument("--seed", type=int, default=None, help="override the problem seed")
    p_run.add_argument("--out", default="runs", help="output directory for trace + manifest")
    p_run.add_argument(
        "--export-config", action="store_true", help="print the resolved config and exit"
    )
    p_run.set_defaults(fn=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run every config file in a directory")
    p_sweep.add_argument("--dir", required=True, help="directory of config files")
    p_sweep.add_argument("--out", default="runs", help="output directory")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="run a quick verification suite")
    p_verify.add_argument("--suite", required=True, help="theorems | polar | gradients")
    p_verify.set_defaults(fn=_cmd_verify)

    p_list = sub.add_parser("list-presets", help="print preset names")
    p_list.set_defaults(fn=_cmd_list_presets)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
