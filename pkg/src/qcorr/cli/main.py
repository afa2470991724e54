"""Command-line entry point ``qcorr``."""

from __future__ import annotations

import argparse
import json
import sys

from ..errors import ConfigError, ConvergenceFailure, InvalidStateError, NumericalError, QcorrError, TruncationError
from .config import ENGINES, load_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CONVERGENCE = 4


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
    common.add_argument("--strict", action="store_true", help="treat truncation warnings as errors")
    common.add_argument("--engine", choices=ENGINES, help="override the configured engine")
    common.add_argument("--tol", type=float, default=1e-3, help="truncation-convergence tolerance")
    parser = argparse.ArgumentParser(prog="qcorr", description="Correlation dynamics of open quantum systems.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="evolve and write metric CSV/SVG files")
    sub.add_parser("validate", parents=[common], help="check a configuration without running it")
    sub.add_parser("converge", parents=[common], help="run the truncation ladder until metrics settle")
    sub.add_parser("sweep", parents=[common], help="one run per value of the configured sweep parameter")
    return parser


def _load(args):
    cfg = load_config(args.config)
    changes = {}
    if args.engine:
        changes["engine"] = args.engine
    if args.strict:
        changes["strict"] = True
    return cfg.replace(**changes) if changes else cfg


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "validate":
            print(json.dumps({"valid": True, "config_hash": cfg.config_hash(), "config": cfg.to_dict()}, indent=2))
            return EXIT_OK
        from . import runner

        if args.command == "run":
            report = runner.run(cfg, args.out)
            print(f"wrote {len(report.files)} metric file sets to {report.out_dir}")
        elif args.command == "converge":
            report = runner.converge_truncation(cfg, args.tol, args.out)
            print(f"converged at dims {report.convergence['converged_dims']}; outputs in {report.out_dir}")
        else:
            reports = runner.sweep(cfg, args.out)
            print(f"wrote {len(reports)} sweep points")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceFailure, TruncationError) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (NumericalError, InvalidStateError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except QcorrError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
