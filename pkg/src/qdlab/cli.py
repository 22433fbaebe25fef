"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when a numerical check fails or the
computation breaks down, 2 on configuration or input errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import checks
from .config import ConfigError, load_config
from .contour import ContourError

log = logging.getLogger("qdlab")

COMMANDS = {
    "monodromy": checks.monodromy_suite,
    "periods": checks.periods_suite,
    "verify-goldman": checks.goldman_suite,
    "symplectic-check": checks.symplectic_suite,
    "variational-check": checks.variational_suite,
}

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdlab", description="Numerical checks for quadratic differentials on the sphere.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or "").strip().splitlines()[0])
        p.add_argument("--config", help="JSON configuration file (schema version 1)")
        p.add_argument("--t", help="puncture t, e.g. 0.31+0.27i")
        p.add_argument("--mu", help="accessory parameter mu, e.g. 1")
        p.add_argument("--n", type=int, help="number of punctures (4 or 5)")
        p.add_argument("--tol", type=float, help="integrator abs/rel tolerance")
        p.add_argument("--report", help="write the JSON report here")
        p.add_argument("--grid", help="NxM grid of (t, mu) in the safe region")
        p.add_argument("--seed", type=int, help="seed for random draws and probe directions")
        p.add_argument("-q", "--quiet", action="store_true", help="do not print the report")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, t=args.t, mu=args.mu, n=args.n, tol=args.tol, grid=args.grid,
                          seed=args.seed, report=args.report)
        rep = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except (ContourError, ArithmeticError, ValueError, RuntimeError, FloatingPointError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_FAIL
    text = rep.write(cfg.report)
    if not args.quiet:
        print(text)
    for c in rep.checks:
        if not c.passed:
            log.warning("FAIL %s: %.3e (tol %.1e)", c.name, c.abs_err, c.tol)
    return EXIT_PASS if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
