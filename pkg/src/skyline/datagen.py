"""Seeded synthetic datasets and CSV ingestion over the [0, 1000] attribute domain."""

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from .geometry import Point
from ..utils.fileio import atomic_write_text
from ..utils.logger import get_logger


DOMAIN_MAX = 1000.0
DISTRIBUTION_ALIASES = {
    "un": "uniform", "uniform": "uniform",
    "co": "correlated", "correlated": "correlated",
    "ac": "anticorrelated", "anticorrelated": "anticorrelated",
}
MIN_DIMENSION = 2
MAX_DIMENSION = 8


class DataGenError(ValueError):
    """Raised for invalid generator or noise specifications."""
    pass


class CsvFormatError(DataGenError):
    """Raised for malformed CSV input; ``row`` is the 1-based line number."""

    def __init__(self, message: str, row: int):
        super().__init__(f"row {row}: {message}")
        self.row = row


@dataclass(frozen=True)
class GenSpec:
    """Synthetic dataset specification."""

    distribution: str
    n: int
    dimension: int
    seed: int = 1

    def __post_init__(self):
        name = DISTRIBUTION_ALIASES.get(str(self.distribution).strip().lower())
        if name is None:
            raise DataGenError(f"Unknown distribution '{self.distribution}'")
        object.__setattr__(self, "distribution", name)
        if self.n < 1:
            raise DataGenError(f"n must be >= 1, got {self.n}")
        if not MIN_DIMENSION <= self.dimension <= MAX_DIMENSION:
            raise DataGenError(
                f"dimension must be in [{MIN_DIMENSION}, {MAX_DIMENSION}], got {self.dimension}"
            )


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian noise with the given variance, in squared attribute units."""

    variance: float
    seed: int = 1

    def __post_init__(self):
        if not (self.variance >= 0 and math.isfinite(self.variance)):
            raise DataGenError(f"variance must be a finite value >= 0, got {self.variance}")


def _rejection_rows(rng: np.random.Generator, n: int, draw) -> np.ndarray:
    """Draw rows with ``draw(rng, m)`` until n of them lie inside the unit cube."""
    rows: List[np.ndarray] = []
    have = 0
    while have < n:
        batch = draw(rng, max(n - have, 64) * 2)
        batch = batch[np.all((batch >= 0.0) & (batch <= 1.0), axis=1)]
        rows.append(batch)
        have += len(batch)
    return np.concatenate(rows)[:n]


def _correlated(dimension: int):
    def draw(rng: np.random.Generator, m: int) -> np.ndarray:
        v = rng.normal(0.5, 0.2, size=(m, 1))
        return v + rng.normal(0.0, 0.05, size=(m, dimension))
    return draw


def _anticorrelated(dimension: int):
    def draw(rng: np.random.Generator, m: int) -> np.ndarray:
        v = rng.normal(0.5, 0.05, size=(m, 1))
        spread = np.minimum(v, 1.0 - v)
        h = rng.uniform(-1.0, 1.0, size=(m, dimension)) * spread
        return v + h - h.mean(axis=1, keepdims=True)
    return draw


def _to_points(data: np.ndarray, first_id: int = 0) -> List[Point]:
    return [Point(tuple(row), first_id + i) for i, row in enumerate(data.tolist())]


def generate(spec: GenSpec) -> List[Point]:
    """Generate ``spec.n`` points in [0, 1000]^D.

    Uniform draws each attribute independently. Correlated points scatter
    around the diagonal, so good values co-occur. Anti-correlated points lie
    near the plane where attributes sum to D/2, so a good value in one
    attribute comes with bad values elsewhere.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.distribution == "uniform":
        data = rng.uniform(0.0, 1.0, size=(spec.n, spec.dimension))
    elif spec.distribution == "correlated":
        data = _rejection_rows(rng, spec.n, _correlated(spec.dimension))
    else:
        data = _rejection_rows(rng, spec.n, _anticorrelated(spec.dimension))

    get_logger(__name__).debug(
        f"Generated {spec.n} {spec.distribution} points, D={spec.dimension}, seed={spec.seed}"
    )
    return _to_points(data * DOMAIN_MAX)


def derive_noisy(points: Sequence[Point], noise: NoiseSpec) -> List[Point]:
    """Perturb every coordinate by N(0, variance) and clamp to the domain.

    Ids are preserved.
    """
    points = list(points)
    if not points:
        return []
    data = np.array([p.coords for p in points], dtype=float)
    if noise.variance > 0:
        rng = np.random.default_rng(noise.seed)
        data = data + rng.normal(0.0, math.sqrt(noise.variance), size=data.shape)
    data = np.clip(data, 0.0, DOMAIN_MAX)
    return [Point(tuple(row), p.id) for row, p in zip(data.tolist(), points)]


def normalize(data: np.ndarray) -> np.ndarray:
    """Map each column's [min, max] onto [0, 1000]; constant columns become 0."""
    lo = data.min(axis=0)
    extent = data.max(axis=0) - lo
    safe = np.where(extent > 0, extent, 1.0)
    return np.where(extent > 0, (data - lo) / safe * DOMAIN_MAX, 0.0)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _parse_row(cells: List[str], row: int) -> List[float]:
    values = []
    for cell in cells:
        try:
            value = float(cell)
        except ValueError:
            raise CsvFormatError(f"non-numeric cell '{cell}'", row)
        if not math.isfinite(value):
            raise CsvFormatError(f"non-finite cell '{cell}'", row)
        values.append(value)
    return values


def ingest_csv(path: Union[str, Path], normalize_values: bool = True,
               id_column: bool = False) -> List[Point]:
    """Read one point per line from a numeric CSV.

    Lines starting with '#' are skipped. A first row with no numeric cell is
    taken as a header.

    Args:
        path: CSV file
        normalize_values: Rescale every attribute onto [0, 1000]
        id_column: Treat the first column as the point id

    Returns:
        List[Point]: Points in file order

    Raises:
        CsvFormatError: On ragged rows or non-numeric cells
    """
    ids: List[int] = []
    rows: List[List[float]] = []
    width: Optional[int] = None
    with open(path, "r", encoding="utf-8", newline="") as f:
        for line_no, cells in enumerate(csv.reader(f), start=1):
            cells = [c.strip() for c in cells]
            if not cells or not any(cells) or cells[0].startswith("#"):
                continue
            try:
                values = _parse_row(cells, line_no)
            except CsvFormatError:
                if not rows and width is None and not any(_is_number(c) for c in cells):
                    width = len(cells)
                    continue
                raise
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise CsvFormatError(f"expected {width} fields, found {len(cells)}", line_no)
            if id_column:
                if not values[0].is_integer():
                    raise CsvFormatError(f"id '{cells[0]}' is not an integer", line_no)
                ids.append(int(values[0]))
                values = values[1:]
            rows.append(values)

    if not rows:
        return []
    data = np.array(rows, dtype=float)
    if normalize_values:
        data = normalize(data)
    if not id_column:
        ids = list(range(len(rows)))
    try:
        return [Point(tuple(row), pid) for row, pid in zip(data.tolist(), ids)]
    except ValueError as e:
        raise CsvFormatError(str(e), 1)


def points_to_csv(points: Sequence[Point], with_ids: bool = True) -> str:
    lines = []
    for p in points:
        fields = [repr(v) for v in p.coords]
        if with_ids:
            fields.insert(0, str(p.id))
        lines.append(",".join(fields))
    return "\n".join(lines) + ("\n" if lines else "")


def write_points_csv(path: Union[str, Path], points: Sequence[Point], with_ids: bool = True,
                     header: Optional[str] = None) -> None:
    """Write points with shortest round-trip float text, atomically."""
    text = points_to_csv(points, with_ids)
    if header:
        text = header.rstrip("\n") + "\n" + text
    atomic_write_text(path, text)


def load_points(path: Union[str, Path], id_column: bool = True,
                normalize_values: bool = False) -> List[Point]:
    """Load points written by write_points_csv (or any compatible CSV)."""
    return ingest_csv(path, normalize_values=normalize_values, id_column=id_column)
