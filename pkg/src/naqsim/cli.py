"""Command-line entry point.

    naqsim simulate     --config run.cfg --out results/
    naqsim sweep-kappa  --set integrator.t_max=1000 --workers 4
    naqsim sweep-field  --set sweep.kappa_list=0,200
    naqsim verify       [--quick]
    naqsim plot         sweep-field --out results/

Exit codes: 0 success, 1 config or argument error, 2 numerical failure,
3 verification failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import experiments
from .config import MODES, ConfigError, load
from .integrator import InvalidStateError
from .qlinalg import NumericalError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="PATH", help="key=value configuration file")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides output_dir)")
    p.add_argument("--set", metavar="KEY=VALUE", action="append", default=[], dest="overrides",
                   help="override one configuration key; repeatable")
    p.add_argument("--workers", metavar="N", type=int, default=1,
                   help="parallel trajectories for sweeps (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="naqsim", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for mode in MODES:
        p = sub.add_parser(mode)
        _common(p)
        if mode == "verify":
            p.add_argument("--quick", action="store_true",
                           help="skip the full-horizon reference-parameter runs")
    p = sub.add_parser("plot", help="write a gnuplot script for a mode's CSV output")
    p.add_argument("mode", choices=[m for m in MODES if m != "verify"])
    _common(p)
    return parser


def _run(args) -> int:
    mode = args.mode if args.command == "plot" else args.command
    cfg = load(args.config, args.overrides)
    cfg = dataclasses.replace(cfg, mode=mode)
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    out = Path(args.out if args.out else cfg.output_dir)

    if args.command == "plot":
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{mode.replace('-', '_')}.gp"
        path.write_text(experiments.gnuplot_script(cfg))
        print(path)
        return EXIT_OK
    if mode == "simulate":
        paths = experiments.run_simulate(cfg, out)
    elif mode == "sweep-kappa":
        paths = experiments.run_sweep_kappa(cfg, out, args.workers)
    elif mode == "sweep-field":
        paths = experiments.run_sweep_field(cfg, out, args.workers)
    else:
        results, paths = experiments.run_verify(cfg, out, include_reference=not args.quick)
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  {r.residual:.3e}")
        failed = [r for r in results if not r.passed]
        print(f"{len(results) - len(failed)}/{len(results)} checks passed")
        return EXIT_VERIFY if failed else EXIT_OK
    for path in paths:
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"naqsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, InvalidStateError) as exc:
        print(f"naqsim: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"naqsim: I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
