"""Workload construction for the benchmark driver.

A point-set flag is either a generator spec ``<dist>:<n>[:<seed>]``, a noise
spec ``noise:<variance>[:<seed>]`` deriving the set from the products, or a
CSV path.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional

from pydantic import BaseModel, Field, field_validator

from ..skyline.config import DISTRIBUTIONS, ENGINES, Config, get_config
from ..skyline.datagen import (
    DISTRIBUTION_ALIASES,
    DataGenError,
    GenSpec,
    NoiseSpec,
    derive_noisy,
    generate,
    load_points,
)
from ..skyline.geometry import Point
from ..skyline.rtree import ARTree, RTree, build_artree, bulk_load, default_fanout
from ..utils.logger import get_logger


class RunConfig(BaseModel):
    """Everything one benchmark run depends on."""

    products: str
    customers: str
    candidates: str
    dimensions: int = Field(default=3, ge=2, le=8)
    distribution: str = "un"
    engine: str = "basic-rsl"
    k: int = Field(default=1, ge=1)
    batch_size: int = Field(default=10, ge=1, le=1000)
    fanout: Optional[int] = Field(default=None, ge=2)
    page_bytes: int = Field(default=4096, ge=256)
    seed: int = 1
    verify: bool = False
    id_column: bool = False
    normalize: bool = False
    out: Optional[str] = None

    @field_validator('distribution')
    @classmethod
    def validate_distribution(cls, v):
        """Validate distribution name."""
        v = v.strip().lower()
        if v not in DISTRIBUTIONS:
            raise ValueError(f"Unknown distribution '{v}', expected one of {DISTRIBUTIONS}")
        return v

    @field_validator('engine')
    @classmethod
    def validate_engine(cls, v):
        """Validate engine name."""
        v = v.strip().lower()
        if v not in ENGINES:
            raise ValueError(f"Unknown engine '{v}', expected one of {ENGINES}")
        return v

    @classmethod
    def from_config(cls, config: Optional[Config] = None, **overrides: Any) -> "RunConfig":
        """Fill unset fields from the workload and k-MAC configuration.

        Args:
            config: Base configuration; defaults to the global one
            **overrides: Explicit values; None means unset

        Returns:
            RunConfig: Validated run configuration
        """
        if config is None:
            config = get_config()
        values: Dict[str, Any] = {
            "dimensions": config.workload.dimensions,
            "distribution": config.workload.distribution,
            "engine": config.kmac.engine,
            "k": config.kmac.k,
            "batch_size": config.kmac.batch_size,
            "fanout": config.index.fanout,
            "page_bytes": config.index.page_bytes,
            "seed": config.workload.seed,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        dist, seed = values["distribution"], values["seed"]
        values.setdefault("products", f"{dist}:{config.workload.products}:{seed}")
        values.setdefault("customers", f"{dist}:{config.workload.customers}:{seed + 1}")
        values.setdefault("candidates", f"{dist}:{config.workload.candidates}:{seed + 2}")
        return cls(**values)

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"out"})


class PointSpec(NamedTuple):
    """Parsed point-set flag."""

    kind: str
    distribution: Optional[str] = None
    n: int = 0
    seed: Optional[int] = None
    variance: float = 0.0
    path: Optional[str] = None


def parse_spec(text: str) -> PointSpec:
    """Classify a point-set flag.

    Raises:
        DataGenError: If a generator or noise spec is malformed
    """
    parts = text.strip().split(":")
    head = parts[0].lower()
    if head == "noise" and len(parts) in (2, 3):
        try:
            variance = float(parts[1])
            seed = int(parts[2]) if len(parts) == 3 else None
        except ValueError:
            raise DataGenError(f"Malformed noise spec '{text}', expected noise:<variance>[:<seed>]")
        return PointSpec("noise", variance=variance, seed=seed)
    if head in DISTRIBUTION_ALIASES and len(parts) in (2, 3):
        try:
            n = int(parts[1])
            seed = int(parts[2]) if len(parts) == 3 else None
        except ValueError:
            raise DataGenError(f"Malformed generator spec '{text}', expected <dist>:<n>[:<seed>]")
        if n < 0:
            raise DataGenError(f"Point count must be >= 0 in '{text}'")
        return PointSpec("gen", distribution=head, n=n, seed=seed)
    return PointSpec("path", path=text)


def resolve_points(text: str, dimensions: int, default_seed: int,
                   products: Optional[List[Point]] = None, id_column: bool = False,
                   normalize_values: bool = False) -> List[Point]:
    """Materialize a point-set flag.

    Args:
        text: Generator spec, noise spec or CSV path
        dimensions: Expected dimensionality
        default_seed: Seed used when the spec names none
        products: Product set a noise spec derives from
        id_column: Read the first CSV column as the point id
        normalize_values: Rescale CSV attributes onto [0, 1000]

    Raises:
        DataGenError: On malformed specs, or a noise spec without products
        OSError: If a CSV path cannot be read
    """
    spec = parse_spec(text)
    seed = default_seed if spec.seed is None else spec.seed
    if spec.kind == "gen":
        if spec.n == 0:
            return []
        return generate(GenSpec(spec.distribution, spec.n, dimensions, seed))
    if spec.kind == "noise":
        if products is None:
            raise DataGenError("A noise spec needs a product set to derive from")
        return derive_noisy(products, NoiseSpec(spec.variance, seed))
    if not Path(spec.path).is_file():
        raise FileNotFoundError(f"Point file not found: {spec.path}")
    points = load_points(spec.path, id_column=id_column, normalize_values=normalize_values)
    if points and points[0].dimension != dimensions:
        raise DataGenError(
            f"{spec.path} has {points[0].dimension} dimensions, expected {dimensions}"
        )
    return points


@dataclass
class Workload:
    """Point sets and the indexes built over them."""

    products: List[Point]
    customers: List[Point]
    candidates: List[Point]
    product_tree: RTree
    customer_tree: ARTree
    fanout: int


def build_workload(config: RunConfig) -> Workload:
    """Resolve all three point sets and bulk-load both indexes."""
    logger = get_logger(__name__)

    csv_options = {"id_column": config.id_column, "normalize_values": config.normalize}
    products = resolve_points(config.products, config.dimensions, config.seed, **csv_options)
    customers = resolve_points(config.customers, config.dimensions, config.seed + 1, products,
                               **csv_options)
    candidates = resolve_points(config.candidates, config.dimensions, config.seed + 2, products,
                                **csv_options)
    fanout = config.fanout or default_fanout(config.dimensions, config.page_bytes)

    product_tree = bulk_load(products, fanout, role="product")
    customer_tree = build_artree(customers, fanout, role="customer")
    logger.info(
        f"Workload ready: |P|={len(products)} |C|={len(customers)} |Q|={len(candidates)} "
        f"D={config.dimensions} fanout={fanout}"
    )
    return Workload(products, customers, candidates, product_tree, customer_tree, fanout)
