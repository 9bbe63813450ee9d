"""Command line entry point.

    nfchan run <experiment> --scenario <file> --out <dir> [--seed N] [--fast]
    nfchan verify [--fast] [--seed N]

Exit codes: 0 success, 1 validation error, 2 numerical failure,
3 acceptance failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import NfchanError, NumericalError, ValidationError
from .experiments import EXPERIMENTS, run_experiment
from .scenario import load_scenario

log = logging.getLogger("nfchan")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nfchan", description="Near-field channel experiments.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment and write CSV + JSON")
    run.add_argument("experiment", choices=EXPERIMENTS)
    run.add_argument("--scenario", required=True, help="scenario JSON file or bundled name (reflection_28ghz, downlink_60ghz)")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--fast", action="store_true", help="half the realizations, twice the grid step")

    ver = sub.add_parser("verify", help="run the acceptance checks")
    ver.add_argument("--seed", type=int, default=None)
    ver.add_argument("--fast", action="store_true", help="reduced effort with doubled tolerances")
    ver.add_argument("--scenario-va", default="reflection_28ghz", help="ground-reflection scenario")
    ver.add_argument("--scenario-vb", default="downlink_60ghz", help="two-user downlink scenario")
    return p


def _run(args) -> int:
    sc = load_scenario(args.scenario)
    paths = run_experiment(args.experiment, sc, args.out, args.seed, args.fast)
    for p in paths:
        print(p)
    return 0


def _verify(args) -> int:
    from .acceptance import run_all

    va = load_scenario(args.scenario_va)
    vb = load_scenario(args.scenario_vb)
    results = run_all(args.seed, args.fast, va, vb, report=lambda s: print(s, flush=True))
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 3 if failed else 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return _run(args)
        return _verify(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ValidationError.exit_code
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NumericalError.exit_code
    except NfchanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NumericalError.exit_code


if __name__ == "__main__":
    sys.exit(main())
