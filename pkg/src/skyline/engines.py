"""Single-query reverse-skyline engines: brute-force oracles, BRS and RSL.

Both engines return exactly the customers c for which no product dynamically
dominates q with respect to c. They differ in the order in which they visit
the product tree T_P and the customer tree T_C:

* ``brs`` expands the product entry nearest to q on every iteration and keeps
  an inner (L) and outer (U) approximation of the influence region, resolving
  customers once they fall inside or outside it.
* ``rsl`` is driven by customer entries. Each leaf customer scans the product
  queue leaves-first and only expands product nodes that may dominate it, so
  confirmed customers are emitted as soon as they are known.
"""

import bisect
import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .frontier import EngineError, InfluenceSet, QueryStats, SkyFrontier
from .geometry import (
    DominanceRegion,
    Point,
    TransformedPoint,
    corner_set,
    dynamically_dominates,
    guaranteed_witnesses,
    midpoint,
    mindist,
    offsets,
    transform,
)
from .rtree import ChildRef, NodeId, RTree, RTreeNode
from ..utils.logger import get_query_logger


ENGINE_NAMES = ("brs", "rsl")

NodeReader = Callable[[RTree, NodeId], RTreeNode]
EmitCallback = Callable[[Point], None]


class PqKey(NamedTuple):
    """Priority of a queue entry; smaller keys are processed first."""

    level: int
    mindist: float
    tiebreak: int


@dataclass(order=True)
class QueueEntry:
    """An R-tree child reference or a leaf point waiting in a priority queue."""

    key: PqKey
    seq: int
    ref: Optional[ChildRef] = field(default=None, compare=False)
    point: Optional[Point] = field(default=None, compare=False)
    region: Optional[DominanceRegion] = field(default=None, compare=False)

    @property
    def is_point(self) -> bool:
        return self.point is not None

    @property
    def count(self) -> int:
        return 1 if self.point is not None else self.ref.count


def _check_dimensions(q: Point, product_tree: RTree, customer_tree: RTree) -> None:
    if not (q.dimension == product_tree.dimension == customer_tree.dimension):
        raise EngineError(
            f"Dimensionality mismatch: q has {q.dimension}, products {product_tree.dimension}, "
            f"customers {customer_tree.dimension}"
        )


def _point_entry(p: Point, q: Tuple[float, ...], seq: int, with_region: bool) -> QueueEntry:
    key = PqKey(0, math.dist(p.coords, q), p.id)
    region = DominanceRegion.from_offsets(offsets(p, q)) if with_region else None
    return QueueEntry(key, seq, point=p, region=region)


def _node_entry(ref: ChildRef, q: Tuple[float, ...], seq: int, level_keys: bool,
                with_region: bool) -> QueueEntry:
    level = ref.level + 1 if level_keys else 0
    key = PqKey(level, mindist(ref.rect, q), ref.node_id)
    region = DominanceRegion.from_rect(ref.rect, q) if with_region else None
    return QueueEntry(key, seq, ref=ref, region=region)


def _children(node: RTreeNode, q: Tuple[float, ...], seq: Iterable[int], level_keys: bool,
              with_region: bool) -> List[QueueEntry]:
    if node.is_leaf:
        return [_point_entry(p, q, next(seq), with_region) for p in node.points]
    return [_node_entry(c, q, next(seq), level_keys, with_region) for c in node.children]


def witnesses(entry: QueueEntry, q: Tuple[float, ...]
              ) -> List[Tuple[TransformedPoint, DominanceRegion]]:
    """Midpoints whose regions lie inside the region of some real product of the entry."""
    if entry.point is not None:
        return [(midpoint(transform(entry.point, q)), entry.region)]
    result = []
    for w in guaranteed_witnesses(entry.ref.rect, q):
        m = midpoint(w)
        result.append((m, DominanceRegion.from_midpoint(m)))
    return result


def lower_midpoint(entry: QueueEntry, q: Tuple[float, ...]) -> TransformedPoint:
    """Optimistic midpoint of an entry: the product itself or the min-corner of its rect."""
    if entry.point is not None:
        return midpoint(transform(entry.point, q))
    return midpoint(corner_set(entry.ref.rect, q).min_corner)


def oracle_dynamic_skyline(c: Point, products: Sequence[Point]) -> set:
    """Ids of products not dynamically dominated with respect to c (pairwise scan)."""
    products = list(products)
    return {
        p.id for p in products
        if not any(dynamically_dominates(other, p, c) for other in products)
    }


def oracle_reverse_skyline(q: Point, products: Sequence[Point],
                           customers: Sequence[Point]) -> InfluenceSet:
    """Ids of customers for which no product dynamically dominates q."""
    products = list(products)
    return {
        c.id for c in customers
        if not any(dynamically_dominates(p, q, c) for p in products)
    }


def entry_expand(ref: ChildRef, q: Tuple[float, ...], tree: RTree, frontier: SkyFrontier,
                 read: NodeReader, stats: QueryStats, seq: Iterable[int]
                 ) -> Tuple[List[QueueEntry], int]:
    """Read one node and return the children worth queueing.

    Customer children are dropped when a frontier member dominates their whole
    extent. Product children are dropped when a frontier member covers their
    region, or when a sibling kept earlier has a guaranteed witness whose region
    strictly covers theirs.

    Args:
        ref: Entry to expand
        q: Query coordinates
        tree: Tree the entry belongs to
        frontier: Midpoints of products found to dominate q
        read: Counted node reader
        stats: Query statistics charged for sibling comparisons
        seq: Shared sequence used to order equal keys

    Returns:
        Tuple[List[QueueEntry], int]: Surviving children and the number of
            indexed points under the dropped ones
    """
    node = read(tree, ref.node_id)
    pruned = 0

    if tree.role == "customer":
        survivors = []
        for entry in _children(node, q, seq, level_keys=True, with_region=False):
            if entry.point is not None:
                dropped = frontier.dominates_point(offsets(entry.point, q))
            else:
                dropped = frontier.dominates_rect(entry.ref.rect, q)
            if dropped:
                pruned += entry.count
            else:
                survivors.append(entry)
        return survivors, pruned

    kept: List[QueueEntry] = []
    kept_witnesses: List[DominanceRegion] = []
    for entry in sorted(_children(node, q, seq, level_keys=True, with_region=True)):
        if frontier.covers(entry.region):
            pruned += entry.count
            continue
        covered = False
        for witness in kept_witnesses:
            stats.dominance_checks += 1
            if witness.strictly_subsumes(entry.region):
                covered = True
                break
        if covered:
            pruned += entry.count
            continue
        kept.append(entry)
        kept_witnesses.extend(region for _, region in witnesses(entry, q))
    return kept, pruned


class RslState:
    """Resumable RSL evaluation of one query point.

    ``step`` processes exactly one customer entry. Batch and branch-and-bound
    evaluators interleave many states; a standalone run simply steps until the
    customer queue is empty.
    """

    def __init__(self, q: Point, product_tree: RTree, customer_tree: RTree,
                 reader: Optional[NodeReader] = None, emit: Optional[EmitCallback] = None,
                 debug: bool = False):
        """Initialize the state and expand both roots.

        Args:
            q: Query point
            product_tree: Index over products
            customer_tree: Index over customers
            reader: Physical node fetcher; defaults to uncached tree access
            emit: Called with each customer the moment it is confirmed
            debug: Check frontier minimality after every insertion

        Raises:
            EngineError: If q and the indexes differ in dimensionality
        """
        _check_dimensions(q, product_tree, customer_tree)
        self.q = q
        self.product_tree = product_tree
        self.customer_tree = customer_tree
        self.stats = QueryStats()
        self.frontier = SkyFrontier(self.stats, debug)
        self.result: InfluenceSet = set()
        self.excluded = 0
        self.total_customers = customer_tree.size
        self.product_queue: List[QueueEntry] = []
        self.customer_queue: List[QueueEntry] = []
        self._reader = reader
        self._emit = emit
        self._seq = itertools.count()

        started = time.perf_counter()
        self.product_queue = sorted(self._expand(product_tree, product_tree.root_node.ref())[0])
        survivors, pruned = self._expand(customer_tree, customer_tree.root_node.ref())
        self.customer_queue = survivors
        heapq.heapify(self.customer_queue)
        self.excluded += pruned
        self.stats.wall_ms += (time.perf_counter() - started) * 1000.0

    @property
    def finished(self) -> bool:
        return not self.customer_queue

    @property
    def is_lower(self) -> int:
        return len(self.result)

    @property
    def is_upper(self) -> int:
        return self.total_customers - self.excluded

    def _read(self, tree: RTree, node_id: NodeId) -> RTreeNode:
        if self._reader is None:
            return self.stats.read(tree, node_id)
        node = self._reader(tree, node_id)
        # logical read; the shared reader charged the physical one
        self.stats.io.record(tree.role)
        self.stats.note_read(tree.role, node_id)
        return node

    def _expand(self, tree: RTree, ref: ChildRef) -> Tuple[List[QueueEntry], int]:
        return entry_expand(ref, self.q.coords, tree, self.frontier, self._read, self.stats, self._seq)

    def step(self) -> bool:
        """Process one customer entry.

        Returns:
            bool: False when the customer queue was already empty
        """
        if not self.customer_queue:
            return False
        started = time.perf_counter()
        entry = heapq.heappop(self.customer_queue)
        if entry.point is None:
            if self.frontier.dominates_rect(entry.ref.rect, self.q.coords):
                self.excluded += entry.ref.count
            else:
                survivors, pruned = self._expand(self.customer_tree, entry.ref)
                self.excluded += pruned
                for child in survivors:
                    heapq.heappush(self.customer_queue, child)
        else:
            self._resolve_customer(entry.point)
        self.stats.wall_ms += (time.perf_counter() - started) * 1000.0
        return True

    def _resolve_customer(self, c: Point) -> None:
        x = offsets(c, self.q)
        if self.frontier.dominates_point(x):
            self.excluded += 1
            return

        queue = self.product_queue
        i = 0
        while i < len(queue):
            entry = queue[i]
            self.stats.dominance_checks += 1
            if not entry.region.contains_offsets(x):
                i += 1
                continue
            if entry.point is not None:
                self.frontier.insert_product(offsets(entry.point, self.q), entry.region)
                self.excluded += 1
                return
            del queue[i]
            survivors, _ = self._expand(self.product_tree, entry.ref)
            for child in survivors:
                bisect.insort(queue, child)
            if survivors:
                i = min(i, bisect.bisect_left(queue, min(survivors)))

        self.result.add(c.id)
        self.stats.record_emit()
        if self._emit is not None:
            self._emit(c)

    def run(self) -> Tuple[InfluenceSet, QueryStats]:
        while self.step():
            pass
        return self.result, self.stats


def rsl(q: Point, product_tree: RTree, customer_tree: RTree,
        emit: Optional[EmitCallback] = None, reader: Optional[NodeReader] = None,
        debug: bool = False) -> Tuple[InfluenceSet, QueryStats]:
    """Compute RSKY(q) with the customer-driven RSL algorithm.

    Args:
        q: Query point
        product_tree: Index over products
        customer_tree: Index over customers
        emit: Called with each customer as soon as it is confirmed
        reader: Physical node fetcher, used to share reads across queries
        debug: Check frontier minimality after every insertion

    Returns:
        Tuple[InfluenceSet, QueryStats]: Customer ids and query counters

    Raises:
        EngineError: If q and the indexes differ in dimensionality
    """
    logger = get_query_logger(__name__)
    logger.log_query_start("rsl", q.id, q.dimension)
    result, stats = RslState(q, product_tree, customer_tree, reader, emit, debug).run()
    logger.log_query_result("rsl", q.id, len(result), stats.total_io, stats.dominance_checks,
                            stats.wall_ms)
    return result, stats


def _clamp_offsets(entry: QueueEntry, q: Tuple[float, ...]) -> Tuple[float, ...]:
    """Signed offset of the point of the entry's rect nearest to q."""
    return tuple(min(max(v, a), b) - v for a, b, v in zip(entry.ref.rect.lo, entry.ref.rect.hi, q))


def brs(q: Point, product_tree: RTree, customer_tree: RTree,
        emit: Optional[EmitCallback] = None, debug: bool = False) -> Tuple[InfluenceSet, QueryStats]:
    """Compute RSKY(q) with the product-driven BRS algorithm.

    The product tree is expanded nearest-first. Live product entries and
    discovered products define two frontiers: U holds guaranteed witnesses and
    bounds the influence region from outside, L holds optimistic regions and
    bounds it from inside. A customer inside U is out, a customer outside L is
    in, anything else waits for more product expansion.

    Args:
        q: Query point
        product_tree: Index over products
        customer_tree: Index over customers
        emit: Called with each customer as soon as it is confirmed
        debug: Check frontier minimality after every insertion

    Returns:
        Tuple[InfluenceSet, QueryStats]: Customer ids and query counters

    Raises:
        EngineError: If q and the indexes differ in dimensionality, or if an
            iteration resolves nothing
    """
    _check_dimensions(q, product_tree, customer_tree)
    logger = get_query_logger(__name__)
    logger.log_query_start("brs", q.id, q.dimension)

    started = time.perf_counter()
    qc = q.coords
    stats = QueryStats()
    seq = itertools.count()
    result: InfluenceSet = set()
    read = stats.read

    upper = SkyFrontier(stats, debug)
    lower = SkyFrontier(stats, debug)
    # live product entries and discovered products, in admission order
    live: Dict[int, QueueEntry] = {}
    product_heap: List[QueueEntry] = []

    def admit(entry: QueueEntry) -> None:
        live[entry.seq] = entry
        lower.insert(lower_midpoint(entry, qc), entry.region)
        for m, region in witnesses(entry, qc):
            upper.insert(m, region)
        if entry.point is None:
            heapq.heappush(product_heap, entry)

    def retire(entry: QueueEntry) -> bool:
        """Drop an entry; True if it was a member of L."""
        del live[entry.seq]
        return any(region is entry.region for region in lower.regions())

    for child in _children(read(product_tree, product_tree.root), qc, seq,
                           level_keys=False, with_region=True):
        admit(child)
    customer_queue = _children(read(customer_tree, customer_tree.root), qc, seq,
                               level_keys=False, with_region=False)
    heapq.heapify(customer_queue)
    checked_version = -1

    while customer_queue:
        progressed = False
        lower_stale = False
        fresh: List[QueueEntry] = []

        if product_heap:
            entry = heapq.heappop(product_heap)
            lower_stale |= retire(entry)
            node = read(product_tree, entry.ref.node_id)
            for child in _children(node, qc, seq, level_keys=False, with_region=True):
                admit(child)
                fresh.append(child)
            progressed = True

        # entries strictly inside U add nothing to L
        candidates = list(live.values()) if upper.version != checked_version else fresh
        checked_version = upper.version
        for entry in candidates:
            if entry.seq in live and upper.covers(entry.region, strict=True):
                lower_stale |= retire(entry)
        product_heap = [e for e in product_heap if e.seq in live]
        heapq.heapify(product_heap)
        if lower_stale:
            lower = SkyFrontier(stats, debug)
            for entry in live.values():
                lower.insert(lower_midpoint(entry, qc), entry.region)

        waiting: List[QueueEntry] = []
        while customer_queue:
            entry = heapq.heappop(customer_queue)
            if entry.point is None:
                if upper.dominates_rect(entry.ref.rect, qc):
                    progressed = True
                elif not product_heap or not lower.dominates_point(_clamp_offsets(entry, qc)):
                    node = read(customer_tree, entry.ref.node_id)
                    for child in _children(node, qc, seq, level_keys=False, with_region=False):
                        heapq.heappush(customer_queue, child)
                    progressed = True
                else:
                    waiting.append(entry)
                continue
            x = offsets(entry.point, q)
            if upper.dominates_point(x):
                progressed = True
            elif not lower.dominates_point(x):
                result.add(entry.point.id)
                stats.record_emit()
                if emit is not None:
                    emit(entry.point)
                progressed = True
            else:
                waiting.append(entry)
        customer_queue = waiting
        heapq.heapify(customer_queue)

        if not progressed:
            raise EngineError(f"BRS stalled for q={q.id} with {len(customer_queue)} customer entries")

    stats.wall_ms = (time.perf_counter() - started) * 1000.0
    logger.log_query_result("brs", q.id, len(result), stats.total_io, stats.dominance_checks,
                            stats.wall_ms)
    return result, stats


def run_single(engine: str, q: Point, product_tree: RTree, customer_tree: RTree,
               emit: Optional[EmitCallback] = None) -> Tuple[InfluenceSet, QueryStats]:
    """Dispatch one query to the named engine.

    Raises:
        EngineError: If the engine name is unknown
    """
    if engine == "rsl":
        return rsl(q, product_tree, customer_tree, emit=emit)
    if engine == "brs":
        return brs(q, product_tree, customer_tree, emit=emit)
    raise EngineError(f"Unknown engine '{engine}', expected one of {ENGINE_NAMES}")
