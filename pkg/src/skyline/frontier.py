"""Per-query engine state: statistics and the skyline frontier of midpoint regions."""

import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Set, Tuple

from .geometry import DominanceRegion, Rect, TransformedPoint, midpoint
from .rtree import IoCounter, NodeId, RTree, RTreeNode, read_node


InfluenceSet = Set[int]


class EngineError(RuntimeError):
    """Raised when a query cannot be evaluated or an engine stops making progress."""
    pass


@dataclass
class QueryStats:
    """Counters of one query.

    ``progress`` holds (total_io, results_emitted) samples appended on every
    node read and every emission, so both components are non-decreasing.
    """

    io: IoCounter = field(default_factory=IoCounter)
    dominance_checks: int = 0
    emitted: int = 0
    progress: List[Tuple[int, int]] = field(default_factory=list)
    node_reads: Set[Tuple[str, NodeId]] = field(default_factory=set)
    wall_ms: float = 0.0
    first_emission_io: Optional[int] = None

    @property
    def reads_product(self) -> int:
        return self.io.reads_product

    @property
    def reads_customer(self) -> int:
        return self.io.reads_customer

    @property
    def total_io(self) -> int:
        return self.io.total

    def read(self, tree: RTree, node_id: NodeId) -> RTreeNode:
        """Fetch a node through ``read_node``, charging ``io``, and note it."""
        node = read_node(tree, node_id, self.io)
        self.note_read(tree.role, node_id)
        return node

    def note_read(self, role: str, node_id: NodeId) -> None:
        """Record the id of a node whose read is already charged to ``io``."""
        self.node_reads.add((role, node_id))
        self.progress.append((self.io.total, self.emitted))

    def record_emit(self) -> None:
        self.emitted += 1
        if self.first_emission_io is None:
            self.first_emission_io = self.io.total
        self.progress.append((self.io.total, self.emitted))

    def io_at_fraction(self, fraction: float) -> Optional[int]:
        """Total I/O at which ``fraction`` of the final results had been emitted.

        Args:
            fraction: Share of results in (0, 1]

        Returns:
            Optional[int]: I/O count, or None when nothing was emitted
        """
        if self.emitted == 0:
            return None
        target = max(1, math.ceil(fraction * self.emitted))
        for total_io, emitted in self.progress:
            if emitted >= target:
                return total_io
        return self.io.total


class SkyFrontier:
    """Set of dominance regions kept minimal under ``DominanceRegion.subsumes``.

    Every predicate evaluation is charged to ``stats.dominance_checks`` when a
    stats object is attached.
    """

    def __init__(self, stats: Optional[QueryStats] = None, debug: bool = False):
        self._members: List[Tuple[TransformedPoint, DominanceRegion]] = []
        self.stats = stats
        self.debug = debug
        self.version = 0

    def _charge(self, n: int = 1) -> None:
        if self.stats is not None:
            self.stats.dominance_checks += n

    def insert(self, m: TransformedPoint, region: Optional[DominanceRegion] = None) -> bool:
        """Add a midpoint unless an existing member already covers it.

        Members covered by the new one are dropped.

        Returns:
            bool: True if the midpoint joined the frontier
        """
        if region is None:
            region = DominanceRegion.from_midpoint(m)
        for _, existing in self._members:
            self._charge()
            if existing.subsumes(region):
                return False
        kept = []
        for member in self._members:
            self._charge()
            if not region.subsumes(member[1]):
                kept.append(member)
        kept.append((m, region))
        self._members = kept
        self.version += 1
        if self.debug:
            self.check_minimality()
        return True

    def insert_product(self, offsets: Tuple[float, ...],
                       region: Optional[DominanceRegion] = None) -> bool:
        """Insert the midpoint of a product at signed offset ``offsets`` from q."""
        m = midpoint(TransformedPoint(tuple(abs(v) for v in offsets),
                                      tuple((v > 0) - (v < 0) for v in offsets)))
        return self.insert(m, region)

    def dominates_point(self, offsets: Tuple[float, ...]) -> bool:
        """True iff some member region contains the customer at signed offset ``offsets``."""
        for _, region in self._members:
            self._charge()
            if region.contains_offsets(offsets):
                return True
        return False

    def dominates_rect(self, rect: Rect, q: Tuple[float, ...]) -> bool:
        """True iff some member region contains the whole rect."""
        for _, region in self._members:
            self._charge()
            if region.contains_rect(rect, q):
                return True
        return False

    def covers(self, region: DominanceRegion, strict: bool = False) -> bool:
        """True iff some member region subsumes ``region``."""
        for _, member in self._members:
            self._charge()
            if member.strictly_subsumes(region) if strict else member.subsumes(region):
                return True
        return False

    def check_minimality(self) -> None:
        """Raise if one member subsumes another."""
        for i, (_, a) in enumerate(self._members):
            for j, (_, b) in enumerate(self._members):
                if i != j and a.subsumes(b):
                    raise EngineError(f"Frontier is not minimal: member {i} subsumes member {j}")

    def regions(self) -> List[DominanceRegion]:
        return [region for _, region in self._members]

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[TransformedPoint]:
        return (m for m, _ in self._members)
