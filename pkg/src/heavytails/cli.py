"""Command-line entry point: ``heavytails <subcommand> SPEC [options]``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import experiment as ex


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("spec", help="run description (INI file)")
    p.add_argument("--out", type=Path, default=None, help="run directory (default runs/<name>-<hash>)")
    p.add_argument("--seed", type=int, default=None, help="override the master seed")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heavytails", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("generate", "build instances and exact ground truths"),
        ("solve", "run simulated annealing over every (instance, alpha, sigma) cell"),
        ("meanfield", "compute spin-vector crossing times"),
        ("analyze", "write hardness, percentile, spread and ECDF tables"),
        ("floppy-stats", "measure floppy-qubit fractions on random states"),
    ]:
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        if name == "analyze":
            p.add_argument("--resamples", type=int, default=1000, help="bootstrap resamples")
        if name == "floppy-stats":
            p.add_argument("--states", type=int, default=10_000, help="random states per instance")
            p.add_argument("--instances", type=int, default=10, help="instances per ensemble")
    v = sub.add_parser("verify", help="run the built-in property suite")
    v.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "verify":
        from .verify import run_all

        return 0 if run_all(args.seed) else 1
    try:
        spec = ex.load_spec(args.spec)
        if args.seed is not None:
            spec = replace(spec, master_seed=args.seed)
    except ex.SpecError as exc:
        print(f"invalid spec: {exc}", file=sys.stderr)
        return ex.EXIT_BAD_SPEC
    out = args.out or ex.default_run_dir(spec)
    if args.command == "generate":
        return ex.cmd_generate(spec, out, args.jobs)
    if args.command == "solve":
        return ex.cmd_solve(spec, out, args.jobs)
    if args.command == "meanfield":
        return ex.cmd_meanfield(spec, out, args.jobs)
    if args.command == "analyze":
        return ex.cmd_analyze(spec, out, args.resamples)
    return ex.cmd_floppy_stats(spec, out, args.states, args.instances)


if __name__ == "__main__":
    sys.exit(main())
