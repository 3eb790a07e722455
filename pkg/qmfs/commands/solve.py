"""`solve` and `sweep`: one MFS solve per N, written as CSV, JSON lines and a table."""

import argparse
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd

from qmfs.core.config import settings
from qmfs.core.errors import ConfigError
from qmfs.numerics.solver import BenchmarkResult, BenchmarkSetup, run_benchmark
from qmfs.schemas.problem import ProblemConfig, load_config, resolve_problem
from qmfs.schemas.results import CSV_COLUMNS, ResultRecord
from qmfs.utils.pdf_report import SweepReportGenerator

logger = logging.getLogger(__name__)


def run_sizes(setup: BenchmarkSetup, sizes: Sequence[int], workers: int = 1) -> List[BenchmarkResult]:
    """Independent solves; results come back in the order of `sizes`."""
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda n: run_benchmark(setup, n), sizes))
    return [run_benchmark(setup, n) for n in sizes]


def write_records(records: Sequence[ResultRecord], output: str, deterministic: bool) -> None:
    frame = pd.DataFrame([r.csv_row(deterministic) for r in records], columns=CSV_COLUMNS)
    frame.to_csv(output, index=False)
    with open(f"{output}.jsonl", "w") as handle:
        for record in records:
            handle.write(record.model_dump_json() + "\n")
    logger.info("wrote records=%d csv=%s", len(records), output)


def print_table(records: Sequence[ResultRecord]) -> None:
    print(f"{'N':>5s}  {'Error for E':>12s}  {'Error for H':>12s}")
    for record in records:
        print(record.table_row())


def execute(config: ProblemConfig, sizes: Sequence[int], output: str, report: Optional[str] = None) -> List[ResultRecord]:
    _, _, setup = resolve_problem(config)
    results = run_sizes(setup, sizes, settings.max_workers)
    echo = config.model_dump(mode="json")
    records = [ResultRecord.from_result(result, echo) for result in results]

    Path(output).parent.mkdir(parents=True, exist_ok=True)
    write_records(records, output, settings.deterministic_csv)
    print_table(records)
    if report:
        Path(report).write_bytes(SweepReportGenerator().generate_sweep_report(records).getvalue())
        logger.info("wrote report=%s", report)
    return records


def _output_path(args: argparse.Namespace, config: ProblemConfig) -> str:
    return args.output or config.output or settings.default_output


def run_solve(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if config.n is None:
        raise ConfigError("required by the solve command", field_path="n")
    execute(config, [config.n], _output_path(args, config), args.report)
    return 0


def run_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    sizes = config.sizes()
    if not sizes:
        raise ConfigError("required by the sweep command", field_path="n_list")
    execute(config, sizes, _output_path(args, config), args.report)
    return 0


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="JSON problem file")
    parser.add_argument("--output", help="CSV output path (JSON lines go to <output>.jsonl)")
    parser.add_argument("--report", help="Optional PDF table of the results")


def register(subparsers) -> None:
    solve = subparsers.add_parser("solve", help="Solve for the single N given by `n`")
    _common(solve)
    solve.set_defaults(handler=run_solve)

    sweep = subparsers.add_parser("sweep", help="Solve for every N in `n_list`")
    _common(sweep)
    sweep.set_defaults(handler=run_sweep)
