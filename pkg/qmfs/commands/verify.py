"""`verify`: numerical oracles as a pass/fail table."""

import argparse
import logging
from pathlib import Path
from typing import List, Optional

import pandas as pd

from qmfs.numerics.chiral import derive_wave_numbers
from qmfs.numerics.verify import CheckOutcome, run_checks
from qmfs.schemas.problem import ProblemConfig, load_config

logger = logging.getLogger(__name__)


def print_outcomes(outcomes: List[CheckOutcome]) -> None:
    print(f"{'check':<32s}  {'value':>10s}  {'limit':>8s}  result")
    for outcome in outcomes:
        verdict = "PASS" if outcome.passed else "FAIL"
        print(f"{outcome.name:<32s}  {outcome.value:>10.3e}  {outcome.tolerance:>8.1e}  {verdict}")


def write_outcomes(outcomes: List[CheckOutcome], output: str) -> None:
    frame = pd.DataFrame(
        [(o.name, repr(o.value), repr(o.tolerance), o.passed) for o in outcomes],
        columns=["check", "value", "tolerance", "passed"],
    )
    Path(output).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(output, index=False)
    logger.info("wrote checks=%d csv=%s", len(outcomes), output)


def verify_suite(config: ProblemConfig, wrong_sign: bool = False, output: Optional[str] = None) -> int:
    alpha, pair = derive_wave_numbers(config.medium)
    outcomes = run_checks(config.checks, alpha, pair, config.fd_config(), wrong_sign=wrong_sign)
    print_outcomes(outcomes)
    if output:
        write_outcomes(outcomes, output)
    failed = [o.name for o in outcomes if not o.passed]
    if failed:
        logger.error("checks failed=%s", ",".join(failed))
        return 1
    logger.info("checks passed=%d", len(outcomes))
    return 0


def run_verify(args: argparse.Namespace) -> int:
    return verify_suite(load_config(args.config), wrong_sign=args.inject_wrong_sign, output=args.output)


def register(subparsers) -> None:
    verify = subparsers.add_parser("verify", help="Run the finite-difference and quadrature checks")
    verify.add_argument("--config", required=True, help="JSON problem file")
    verify.add_argument("--output", help="Optional CSV of the outcome table")
    verify.add_argument(
        "--inject-wrong-sign",
        action="store_true",
        help="Feed the radiation check the opposite kernel (control case, must fail)",
    )
    verify.set_defaults(handler=run_verify)
