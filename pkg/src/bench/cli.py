"""Command-line driver: dataset generation, single queries, k-MAC runs and sweeps.

Exit codes: 0 success, 1 invalid usage, 2 runtime failure.
"""

import argparse
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

from pydantic import ValidationError

from .report import (
    CANDIDATE_COLUMNS,
    KMAC_COLUMNS,
    QUERY_COLUMNS,
    SWEEP_COLUMNS,
    RunReport,
    aggregate_row,
    progress_rows,
    render_csv,
    stats_row,
    write_report,
)
from .workload import RunConfig, Workload, build_workload, parse_spec
from ..skyline.config import DISTRIBUTIONS, get_config
from ..skyline.datagen import DataGenError, GenSpec, generate, write_points_csv
from ..skyline.engines import ENGINE_NAMES, oracle_reverse_skyline, run_single
from ..skyline.frontier import EngineError
from ..skyline.kmac import KMAC_ENGINES, KmacResult, basic_kmac, batch_kmac, bb_kmac
from ..skyline.rtree import RTreeError
from ..skyline.selection import CandidateProfile, SelectionError, exhaustive_opt
from ..utils.logger import get_logger


SWEEP_AXES = ("P", "C", "Q", "D", "B", "k")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class BenchError(Exception):
    """Base class for driver failures."""

    exit_code = EXIT_RUNTIME


class UsageError(BenchError):
    """Invalid flags or flag combinations."""

    exit_code = EXIT_USAGE


class RunError(BenchError):
    """Failure while building the workload or running an engine."""

    exit_code = EXIT_RUNTIME


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message: str):
        raise UsageError(message)


def _dimension(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid dimension '{text}'")
    if not 2 <= value <= 8:
        raise argparse.ArgumentTypeError(f"dimension must be in [2, 8], got {value}")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer '{text}'")
    if value < 1:
        raise argparse.ArgumentTypeError(f"value must be >= 1, got {value}")
    return value


def _add_workload_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--products", help="Product set: <dist>:<n>[:<seed>] or CSV path")
    parser.add_argument("--customers", help="Customer set: spec, noise:<variance>[:<seed>] or CSV path")
    parser.add_argument("--candidates", help="Candidate set: spec, noise:<variance>[:<seed>] or CSV path")
    parser.add_argument("--d", type=_dimension, dest="dimensions", help="Dimensionality (2-8)")
    parser.add_argument("--dist", choices=DISTRIBUTIONS, dest="distribution",
                        help="Distribution for generated sets")
    parser.add_argument("--fanout", type=_positive, help="R-tree fanout override")
    parser.add_argument("--page-bytes", type=_positive, dest="page_bytes",
                        help="Page size used to derive the fanout (default: 4096)")
    parser.add_argument("--seed", type=int, help="Base seed for generated sets")
    parser.add_argument("--verify", action="store_true", help="Cross-check against the brute-force oracle")
    parser.add_argument("--id-column", action="store_true", dest="id_column",
                        help="Read the first column of CSV inputs as the point id")
    parser.add_argument("--normalize", action="store_true",
                        help="Rescale every CSV attribute onto [0, 1000]")
    parser.add_argument("--out", help="Report CSV path (default: stdout)")


def build_parser() -> CliParser:
    """Build the argument parser with its four subcommands."""
    parser = CliParser(
        prog="rskyline",
        description="Reverse skyline and k-MAC benchmark driver",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", parser_class=CliParser)
    sub.required = True

    gen = sub.add_parser("gen", help="Generate a synthetic point set")
    gen.add_argument("--dist", choices=DISTRIBUTIONS, default="un", help="Distribution (default: un)")
    gen.add_argument("--n", type=_positive, required=True, help="Number of points")
    gen.add_argument("--d", type=_dimension, default=3, dest="dimensions", help="Dimensionality (2-8)")
    gen.add_argument("--seed", type=int, default=1, help="Seed (default: 1)")
    gen.add_argument("--out", required=True, help="Output CSV path")

    query = sub.add_parser("query", help="Run one reverse skyline query per candidate")
    _add_workload_flags(query)
    query.add_argument("--engine", choices=ENGINE_NAMES, default="rsl", help="Engine (default: rsl)")

    kmac = sub.add_parser("kmac", help="Select k candidates maximizing joint influence")
    _add_workload_flags(kmac)
    kmac.add_argument("--engine", choices=KMAC_ENGINES, help="Evaluator (default: basic-rsl)")
    kmac.add_argument("--k", type=_positive, help="Number of candidates to select")
    kmac.add_argument("--batch-size", type=_positive, dest="batch_size", help="Batch size for --engine batch")

    sweep = sub.add_parser("sweep", help="Repeat kmac over one varying parameter")
    _add_workload_flags(sweep)
    sweep.add_argument("--axis", required=True, help=f"Parameter to vary: {', '.join(SWEEP_AXES)}")
    sweep.add_argument("--values", required=True, help="Comma separated values")
    sweep.add_argument("--engine", default="basic-rsl", help="Comma separated evaluators")
    sweep.add_argument("--k", type=_positive, help="Number of candidates to select")
    sweep.add_argument("--batch-size", type=_positive, dest="batch_size", help="Batch size")
    return parser


def run_config_from_args(args: argparse.Namespace, **overrides: Any) -> RunConfig:
    """Merge parsed flags over the configured defaults.

    Raises:
        UsageError: If the merged values fail validation
    """
    fields = ("products", "customers", "candidates", "dimensions", "distribution", "engine", "k",
              "batch_size", "fanout", "page_bytes", "seed", "verify", "id_column", "normalize", "out")
    values = {name: getattr(args, name, None) for name in fields}
    values.update(overrides)
    try:
        config = RunConfig.from_config(**values)
        for flag in (config.products, config.customers, config.candidates):
            parse_spec(flag)
    except (ValidationError, DataGenError) as e:
        raise UsageError(str(e))
    return config


def _load(config: RunConfig) -> Workload:
    try:
        return build_workload(config)
    except (DataGenError, RTreeError, OSError, ValueError) as e:
        raise RunError(f"Cannot build workload: {e}")


def _emit(report: RunReport, out: Optional[str]) -> None:
    if out:
        write_report(report, out)
    else:
        sys.stdout.write(render_csv(report.columns, report.rows, report.config))


def cmd_gen(args: argparse.Namespace) -> Path:
    """Generate a point set and write it as CSV."""
    try:
        points = generate(GenSpec(args.dist, args.n, args.dimensions, args.seed))
    except DataGenError as e:
        raise UsageError(str(e))
    header = f"# rskyline-kit v1 gen dist={args.dist} n={args.n} d={args.dimensions} seed={args.seed}"
    write_points_csv(args.out, points, with_ids=True, header=header)
    get_logger(__name__).info(f"Wrote {len(points)} points to {args.out}")
    return Path(args.out)


def cmd_query(config: RunConfig) -> RunReport:
    """Run the single-query engine for every candidate in turn."""
    if config.engine not in ENGINE_NAMES:
        raise UsageError(f"query needs one of {ENGINE_NAMES}, got '{config.engine}'")
    workload = _load(config)
    columns = QUERY_COLUMNS + (["oracle_ok"] if config.verify else [])
    report = RunReport(config.echo(), columns)

    for q in workload.candidates:
        try:
            result, stats = run_single(config.engine, q, workload.product_tree, workload.customer_tree)
        except EngineError as e:
            raise RunError(str(e))
        row = stats_row(config.engine, q.id, len(result), stats)
        if config.verify:
            expected = oracle_reverse_skyline(q, workload.products, workload.customers)
            row["oracle_ok"] = result == expected
        report.rows.append(row)
        report.progress.extend(progress_rows(config.engine, q.id, stats))

    if report.rows:
        total = aggregate_row(config.engine, report.rows)
        if config.verify:
            total["oracle_ok"] = all(r["oracle_ok"] for r in report.rows)
        report.rows.append(total)
    get_logger(__name__).info(f"query {config.engine}: {len(workload.candidates)} candidates")
    return report


def evaluate_kmac(config: RunConfig, workload: Workload) -> KmacResult:
    """Dispatch a k-MAC evaluation to the configured evaluator."""
    if config.k > len(workload.candidates):
        raise UsageError(f"k={config.k} exceeds the {len(workload.candidates)} candidates")
    args = (workload.candidates, workload.product_tree, workload.customer_tree, config.k)
    try:
        if config.engine == "basic-brs":
            return basic_kmac(*args, engine="brs")
        if config.engine == "basic-rsl":
            return basic_kmac(*args, engine="rsl")
        if config.engine == "batch":
            return batch_kmac(*args, batch_size=config.batch_size)
        if config.engine == "bb":
            return bb_kmac(*args)
    except (EngineError, SelectionError) as e:
        raise RunError(str(e))
    raise UsageError(f"kmac needs one of {KMAC_ENGINES}, got '{config.engine}'")


def kmac_row(config: RunConfig, workload: Workload, result: KmacResult) -> Dict[str, Any]:
    return {
        "engine": result.engine,
        "k": config.k,
        "batch_size": config.batch_size,
        "candidates": len(workload.candidates),
        "chosen_ids": ";".join(str(i) for i in result.selection.ids),
        "joint_score": result.selection.joint_score,
        "reads_product": result.reads_product,
        "reads_customer": result.reads_customer,
        "total_io": result.total_io,
        "dominance_checks": result.dominance_checks,
        "discarded": len(result.discarded),
        "wall_ms": f"{result.elapsed_ms:.3f}",
    }


def _verify_kmac(workload: Workload, result: KmacResult, k: int) -> Tuple[bool, Any]:
    """Oracle check of every fully evaluated candidate, plus the exhaustive optimum.

    The optimum is left blank when the number of k-subsets exceeds the
    configured exhaustive guard.
    """
    oracle = {
        q.id: oracle_reverse_skyline(q, workload.products, workload.customers)
        for q in workload.candidates
    }
    ok = all(result.influence[qid] == oracle[qid]
             for qid in result.influence if qid not in result.discarded)
    try:
        profiles = [CandidateProfile(qid, members) for qid, members in oracle.items()]
        optimum = exhaustive_opt(profiles, k, get_config().kmac.exhaustive_guard).joint_score
    except SelectionError:
        optimum = ""
    return ok, optimum


def cmd_kmac(config: RunConfig) -> RunReport:
    """Evaluate candidates, select k of them and report the selection with its cost."""
    workload = _load(config)
    result = evaluate_kmac(config, workload)
    columns = KMAC_COLUMNS + (["oracle_ok", "opt_score"] if config.verify else [])
    row = kmac_row(config, workload, result)
    if config.verify:
        row["oracle_ok"], row["opt_score"] = _verify_kmac(workload, result, config.k)

    detail = []
    for qid in sorted(result.stats):
        stats = result.stats[qid]
        detail.append({
            "engine": result.engine, "candidate_id": qid, "influence": len(result.influence[qid]),
            "reads_product": stats.reads_product, "reads_customer": stats.reads_customer,
            "dominance_checks": stats.dominance_checks, "discarded": qid in result.discarded,
            "wall_ms": f"{stats.wall_ms:.3f}",
        })
    get_logger(__name__).info(
        f"kmac {result.engine}: chose {list(result.selection.ids)} "
        f"score={result.selection.joint_score} io={result.total_io} "
        f"kgcs_ms={result.selection.elapsed_ms:.3f}"
    )
    return RunReport(config.echo(), columns, [row], detail=detail, detail_columns=CANDIDATE_COLUMNS)


def _sweep_override(config: RunConfig, axis: str, value: str) -> Dict[str, Any]:
    try:
        number = int(value)
    except ValueError:
        raise UsageError(f"Sweep value '{value}' is not an integer")
    if axis in ("P", "C", "Q"):
        field = {"P": "products", "C": "customers", "Q": "candidates"}[axis]
        spec = parse_spec(getattr(config, field))
        if spec.kind != "gen":
            raise UsageError(f"Axis {axis} needs a generated {field} set, got '{getattr(config, field)}'")
        seed = f":{spec.seed}" if spec.seed is not None else ""
        return {field: f"{spec.distribution}:{number}{seed}"}
    if axis == "D":
        return {"dimensions": number}
    if axis == "B":
        return {"batch_size": number}
    return {"k": number}


def cmd_sweep(args: argparse.Namespace) -> RunReport:
    """Repeat a k-MAC run for every value of one axis and every listed evaluator."""
    if args.axis not in SWEEP_AXES:
        raise UsageError(f"Unknown axis '{args.axis}', expected one of {SWEEP_AXES}")
    engines = [e.strip() for e in args.engine.split(",") if e.strip()]
    unknown = [e for e in engines if e not in KMAC_ENGINES]
    if unknown or not engines:
        raise UsageError(f"Unknown evaluators {unknown}, expected from {KMAC_ENGINES}")
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise UsageError("--values needs at least one value")

    base = run_config_from_args(args, engine=engines[0])
    report = RunReport({**base.echo(), "axis": args.axis, "values": values, "engines": engines},
                       SWEEP_COLUMNS)
    for value in values:
        for engine in engines:
            config = run_config_from_args(args, engine=engine, **_sweep_override(base, args.axis, value))
            workload = _load(config)
            result = evaluate_kmac(config, workload)
            report.rows.append({"axis": args.axis, "value": value, **kmac_row(config, workload, result)})
            get_logger(__name__).debug(f"sweep {args.axis}={value} {engine}: "
                                       f"kgcs_ms={result.selection.elapsed_ms:.3f}")
    get_logger(__name__).info(f"sweep {args.axis}: {len(report.rows)} rows")
    return report


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``rskyline`` command.

    Returns:
        int: Process exit code
    """
    logger = get_logger(__name__)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        started = time.perf_counter()
        if args.command == "gen":
            cmd_gen(args)
        elif args.command == "query":
            report = cmd_query(run_config_from_args(args))
            _emit(report, args.out)
        elif args.command == "kmac":
            report = cmd_kmac(run_config_from_args(args))
            _emit(report, args.out)
        else:
            report = cmd_sweep(args)
            _emit(report, args.out)
        logger.info(f"{args.command} finished in {(time.perf_counter() - started) * 1000.0:.1f}ms")
        return EXIT_OK
    except BenchError as e:
        print(f"rskyline: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"rskyline: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
