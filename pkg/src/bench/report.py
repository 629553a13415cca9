"""Benchmark reports and their CSV serialization."""

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from ..skyline.frontier import QueryStats
from ..utils.fileio import atomic_write_text


SCHEMA_LINE = "# rskyline-kit v1"

QUERY_COLUMNS = [
    "engine", "candidate_id", "influence", "reads_product", "reads_customer", "total_io",
    "dominance_checks", "first_emission_io", "io_at_5pct", "wall_ms",
]
PROGRESS_COLUMNS = ["engine", "candidate_id", "total_io", "results_emitted"]
CANDIDATE_COLUMNS = [
    "engine", "candidate_id", "influence", "reads_product", "reads_customer",
    "dominance_checks", "discarded", "wall_ms",
]
KMAC_COLUMNS = [
    "engine", "k", "batch_size", "candidates", "chosen_ids", "joint_score", "reads_product",
    "reads_customer", "total_io", "dominance_checks", "discarded", "wall_ms",
]
SWEEP_COLUMNS = ["axis", "value"] + KMAC_COLUMNS


@dataclass
class RunReport:
    """Result rows of one command plus the configuration that produced them."""

    config: Dict[str, Any]
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    progress: List[Dict[str, Any]] = field(default_factory=list)
    detail: List[Dict[str, Any]] = field(default_factory=list)
    detail_columns: List[str] = field(default_factory=list)


def stats_row(engine: str, candidate_id: Union[int, str], influence: int,
              stats: QueryStats) -> Dict[str, Any]:
    """Counters of one query as a report row."""
    return {
        "engine": engine,
        "candidate_id": candidate_id,
        "influence": influence,
        "reads_product": stats.reads_product,
        "reads_customer": stats.reads_customer,
        "total_io": stats.total_io,
        "dominance_checks": stats.dominance_checks,
        "first_emission_io": "" if stats.first_emission_io is None else stats.first_emission_io,
        "io_at_5pct": _blank(stats.io_at_fraction(0.05)),
        "wall_ms": f"{stats.wall_ms:.3f}",
    }


def aggregate_row(engine: str, rows: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
    """Sum of the counter columns over per-candidate rows."""
    summed = {
        key: sum(int(r[key]) for r in rows)
        for key in ("influence", "reads_product", "reads_customer", "total_io", "dominance_checks")
    }
    wall = sum(float(r["wall_ms"]) for r in rows)
    return {"engine": engine, "candidate_id": "total", **summed,
            "first_emission_io": "", "io_at_5pct": "", "wall_ms": f"{wall:.3f}"}


def progress_rows(engine: str, candidate_id: int, stats: QueryStats) -> List[Dict[str, Any]]:
    return [
        {"engine": engine, "candidate_id": candidate_id, "total_io": total_io,
         "results_emitted": emitted}
        for total_io, emitted in stats.progress
    ]


def _blank(value: Optional[Any]) -> Any:
    return "" if value is None else value


def render_csv(columns: Sequence[str], rows: Sequence[Dict[str, Any]],
               config: Optional[Dict[str, Any]] = None) -> str:
    """CSV text led by the schema line and, optionally, the configuration echo."""
    buffer = io.StringIO()
    buffer.write(SCHEMA_LINE + "\n")
    if config is not None:
        buffer.write("# config " + json.dumps(config, sort_keys=True) + "\n")
    writer = csv.DictWriter(buffer, fieldnames=list(columns), extrasaction="ignore",
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def sibling_path(out: Union[str, Path], suffix: str) -> Path:
    """``results.csv`` -> ``results.<suffix>.csv`` in the same directory."""
    out = Path(out)
    return out.with_name(f"{out.stem}.{suffix}.csv")


def write_report(report: RunReport, out: Union[str, Path]) -> List[Path]:
    """Write the main CSV and, when present, the progress and per-candidate CSVs.

    Returns:
        List[Path]: Files written
    """
    written = [Path(out)]
    atomic_write_text(out, render_csv(report.columns, report.rows, report.config))
    if report.progress:
        path = sibling_path(out, "progress")
        atomic_write_text(path, render_csv(PROGRESS_COLUMNS, report.progress, report.config))
        written.append(path)
    if report.detail:
        path = sibling_path(out, "candidates")
        atomic_write_text(path, render_csv(report.detail_columns, report.detail, report.config))
        written.append(path)
    return written
