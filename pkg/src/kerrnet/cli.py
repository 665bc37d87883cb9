"""Command-line entry point.

    kerrnet <subcommand> [--preset NAME] [--config PATH] [--set key=value]... [--out DIR]

Subcommands: spectrum, passage, alpha-scan, lossy-prep, robustness.
Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import scenarios
from .errors import ConfigError, KerrnetError

RUNNERS = {
    "spectrum": scenarios.run_spectrum,
    "passage": scenarios.run_passage,
    "alpha-scan": scenarios.run_alpha_scan,
    "lossy-prep": scenarios.run_lossy_prep,
    "robustness": scenarios.run_robustness,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kerrnet",
        description="Deterministic simulator for the Kerr-nonlinear two-mode "
                    "cavity ring (entangled-state preparation and protection).")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--preset", choices=sorted(scenarios.PRESETS),
                       help="figure preset supplying caption parameters")
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override a config entry by dotted path (repeatable)")
        p.add_argument("--out", default="out", help="output directory (default: out)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = scenarios.load_config(args.preset, args.config, args.overrides)
        if args.preset is not None:
            expected = scenarios.PRESETS[args.preset]["subcommand"]
            if expected != args.subcommand:
                raise ConfigError(
                    f"preset '{args.preset}' belongs to the '{expected}' subcommand")
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        files = RUNNERS[args.subcommand](cfg, out_dir)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KerrnetError as exc:
        print(f"numerical failure in '{args.subcommand}': {exc}", file=sys.stderr)
        return 3
    for f in files:
        print(f)
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
