"""Multi-candidate evaluators for the k-MAC query.

* ``basic_kmac`` runs one single-query engine per candidate, then kgcs.
* ``batch_kmac`` groups candidates into Hilbert-ordered batches and advances
  their RSL states round-robin; within a batch every node is read from the
  index once and served to all candidates from the batch buffer.
* ``bb_kmac`` steps candidates in order of their influence upper bound and
  discards those that can no longer belong to an optimal selection.
"""

import heapq
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from .engines import RslState, run_single
from .frontier import EngineError, InfluenceSet, QueryStats
from .geometry import Point
from .hilbert import hilbert_order
from .rtree import ARTree, IoCounter, NodeId, RTree, RTreeNode, read_node
from .selection import CandidateProfile, Selection, SelectionError, kgcs
from ..utils.logger import get_logger, get_query_logger


KMAC_ENGINES = ("basic-brs", "basic-rsl", "batch", "bb")

# Per-candidate RSL state: queues, frontier, confirmed set and IS bounds.
CandidateState = RslState

BoundObserver = Callable[[int, int, int], None]


@dataclass(frozen=True)
class Batch:
    """Candidates contiguous in Hilbert order."""

    candidates: Tuple[Point, ...]

    @property
    def ids(self) -> Tuple[int, ...]:
        return tuple(q.id for q in self.candidates)

    def __len__(self) -> int:
        return len(self.candidates)


class SharedReadLedger:
    """Nodes physically read during one batch, with the buffer that serves them.

    Only buffer misses go through ``read_node``, so ``io`` counts each node once.
    """

    def __init__(self):
        self.io = IoCounter()
        self.reads: Set[Tuple[str, NodeId]] = set()
        self._buffer: Dict[Tuple[str, NodeId], RTreeNode] = {}

    def read(self, tree: RTree, node_id: NodeId) -> RTreeNode:
        key = (tree.role, node_id)
        node = self._buffer.get(key)
        if node is None:
            node = read_node(tree, node_id, self.io)
            self._buffer[key] = node
            self.reads.add(key)
        return node

    def count(self, role: str) -> int:
        return self.io.reads_product if role == "product" else self.io.reads_customer

    def __len__(self) -> int:
        return self.io.total


@dataclass
class KmacResult:
    """Selection plus everything measured while evaluating the candidates."""

    engine: str
    selection: Selection
    influence: Dict[int, InfluenceSet]
    stats: Dict[int, QueryStats]
    ledgers: List[SharedReadLedger] = field(default_factory=list)
    discarded: Set[int] = field(default_factory=set)
    elapsed_ms: float = 0.0

    @property
    def reads_product(self) -> int:
        if self.ledgers:
            return sum(ledger.count("product") for ledger in self.ledgers)
        return sum(s.reads_product for s in self.stats.values())

    @property
    def reads_customer(self) -> int:
        if self.ledgers:
            return sum(ledger.count("customer") for ledger in self.ledgers)
        return sum(s.reads_customer for s in self.stats.values())

    @property
    def total_io(self) -> int:
        return self.reads_product + self.reads_customer

    @property
    def dominance_checks(self) -> int:
        return sum(s.dominance_checks for s in self.stats.values())


def _check_candidates(candidates: Sequence[Point], k: int) -> None:
    if k < 1 or k > len(candidates):
        raise SelectionError(f"k must be in [1, {len(candidates)}], got {k}")
    ids = [q.id for q in candidates]
    if len(ids) != len(set(ids)):
        raise SelectionError("Candidate ids must be unique")


def _select(influence: Dict[int, InfluenceSet], k: int) -> Selection:
    return kgcs([CandidateProfile(qid, result) for qid, result in influence.items()], k)


def basic_kmac(candidates: Sequence[Point], product_tree: RTree, customer_tree: RTree,
               k: int, engine: str = "rsl") -> KmacResult:
    """Evaluate every candidate independently with ``engine``, then select greedily.

    Raises:
        SelectionError: If k is out of range
        EngineError: If the engine name is unknown
    """
    _check_candidates(candidates, k)
    logger = get_logger(__name__)
    started = time.perf_counter()

    influence: Dict[int, InfluenceSet] = {}
    stats: Dict[int, QueryStats] = {}
    for q in candidates:
        influence[q.id], stats[q.id] = run_single(engine, q, product_tree, customer_tree)

    selection = _select(influence, k)
    elapsed = (time.perf_counter() - started) * 1000.0
    logger.info(f"basic-{engine}: {len(candidates)} candidates, k={k}, score={selection.joint_score}")
    return KmacResult(f"basic-{engine}", selection, influence, stats, elapsed_ms=elapsed)


def hilbert_partition(candidates: Sequence[Point], batch_size: int) -> List[Batch]:
    """Sort candidates along the Hilbert curve and cut them into batches.

    Raises:
        ValueError: If batch_size < 1
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    ordered = hilbert_order(candidates)
    return [Batch(tuple(ordered[i:i + batch_size])) for i in range(0, len(ordered), batch_size)]


def batch_rsa(batch: Batch, product_tree: RTree, customer_tree: RTree
              ) -> Tuple[Dict[int, Tuple[InfluenceSet, QueryStats]], SharedReadLedger]:
    """Run RSL for every candidate of a batch with shared physical reads.

    Candidates take turns in increasing id order, one customer entry per
    turn, skipping those already finished. Each candidate's queues and
    frontier are its own, so its result and logical reads match a standalone
    run; the ledger records each node once.

    Returns:
        Tuple: Per-candidate (influence set, stats) and the batch ledger

    Raises:
        EngineError: If the batch is empty
    """
    if len(batch) == 0:
        raise EngineError("Cannot evaluate an empty batch")
    ledger = SharedReadLedger()
    states = {
        q.id: CandidateState(q, product_tree, customer_tree, reader=ledger.read)
        for q in sorted(batch.candidates, key=lambda p: p.id)
    }
    active = list(states)
    while active:
        for qid in active:
            states[qid].step()
        active = [qid for qid in active if not states[qid].finished]
    return {qid: (st.result, st.stats) for qid, st in states.items()}, ledger


def batch_kmac(candidates: Sequence[Point], product_tree: RTree, customer_tree: RTree,
               k: int, batch_size: int = 10) -> KmacResult:
    """Hilbert batches, Batch-RSA per batch, then kgcs over all influence sets."""
    _check_candidates(candidates, k)
    logger = get_query_logger(__name__)
    started = time.perf_counter()

    influence: Dict[int, InfluenceSet] = {}
    stats: Dict[int, QueryStats] = {}
    ledgers: List[SharedReadLedger] = []
    for index, batch in enumerate(hilbert_partition(candidates, batch_size)):
        results, ledger = batch_rsa(batch, product_tree, customer_tree)
        for qid, (result, query_stats) in results.items():
            influence[qid] = result
            stats[qid] = query_stats
        ledgers.append(ledger)
        logger.log_batch(index, len(batch), len(ledger))

    selection = _select(influence, k)
    elapsed = (time.perf_counter() - started) * 1000.0
    logger.info(f"batch: {len(ledgers)} batches of <= {batch_size}, k={k}, "
                f"score={selection.joint_score}")
    return KmacResult("batch", selection, influence, stats, ledgers, elapsed_ms=elapsed)


def _top_sum(values: List[int], n: int) -> int:
    return sum(sorted(values, reverse=True)[:n]) if n > 0 else 0


def bb_kmac(candidates: Sequence[Point], product_tree: RTree, customer_tree: ARTree, k: int,
            observer: Optional[BoundObserver] = None) -> KmacResult:
    """Branch-and-bound k-MAC over per-candidate influence bounds.

    IS+(q) starts at |C| and drops by the stored count of every customer
    subtree pruned for q and by one for every customer shown to be outside
    RSKY(q); IS-(q) counts confirmed customers. The candidate with the largest
    IS+ is advanced by one customer entry at a time. A candidate is discarded
    when IS+(q) plus the k-1 largest IS+ of the other remaining candidates
    falls below the greedy score of the confirmed sets. Before the final
    selection, discarded candidates whose IS+ reaches the smallest greedy gain
    over the survivors are refined and rejoin them, so the picks equal those
    of greedy selection over every candidate.

    Args:
        candidates: Candidate points
        product_tree: Index over products
        customer_tree: Aggregate-count index over customers
        k: Number of candidates to select
        observer: Called as observer(candidate_id, is_lower, is_upper) after each step

    Returns:
        KmacResult: Selection over the candidates that finished refinement

    Raises:
        SelectionError: If k is out of range
        EngineError: If the customer index carries no subtree counts
    """
    _check_candidates(candidates, k)
    if not isinstance(customer_tree, ARTree):
        raise EngineError("bb_kmac needs an aggregate-count customer index (build_artree)")
    logger = get_logger(__name__)
    started = time.perf_counter()

    states: Dict[int, CandidateState] = {q.id: CandidateState(q, product_tree, customer_tree)
                                         for q in candidates}
    heap = [(-st.is_upper, qid) for qid, st in states.items()]
    heapq.heapify(heap)
    discarded: Set[int] = set()
    best_lower = 0

    def lower_bound() -> int:
        remaining = [qid for qid in states if qid not in discarded]
        if k == 1:
            return max(states[qid].is_lower for qid in remaining)
        profiles = [CandidateProfile(qid, states[qid].result) for qid in remaining]
        return kgcs(profiles, k, allow_short=True).joint_score

    while heap:
        neg_upper, qid = heapq.heappop(heap)
        state = states[qid]
        if qid in discarded or state.finished or -neg_upper != state.is_upper:
            continue
        confirmed = state.is_lower
        state.step()
        if observer is not None:
            observer(qid, state.is_lower, state.is_upper)
        if not state.finished:
            heapq.heappush(heap, (-state.is_upper, qid))
        if state.is_lower != confirmed:
            best_lower = lower_bound()
        if best_lower == 0:
            continue

        remaining = [i for i in states if i not in discarded]
        uppers = {i: states[i].is_upper for i in remaining}
        top = sorted(remaining, key=lambda i: (-uppers[i], i))[:k]
        top_sum = sum(uppers[i] for i in top)
        for i in remaining:
            if states[i].finished:
                continue
            others = top_sum - uppers[i] if i in top else _top_sum([uppers[j] for j in top], k - 1)
            if uppers[i] + others < best_lower:
                discarded.add(i)

    while True:
        survivors = {qid: st.result for qid, st in states.items() if qid not in discarded}
        selection = _select(survivors, k)
        floor = min(selection.gains)
        # discarded candidates at or above the gain floor can still win a greedy stage
        revived = sorted(qid for qid in discarded if states[qid].is_upper >= floor)
        if not revived:
            break
        for qid in revived:
            discarded.discard(qid)
            state = states[qid]
            while state.step():
                if observer is not None:
                    observer(qid, state.is_lower, state.is_upper)
        logger.debug(f"bb: refined {len(revived)} discarded candidates against gain floor {floor}")
    elapsed = (time.perf_counter() - started) * 1000.0
    logger.info(f"bb: {len(candidates)} candidates, {len(discarded)} discarded, k={k}, "
                f"score={selection.joint_score}")
    return KmacResult(
        "bb", selection,
        {qid: st.result for qid, st in states.items()},
        {qid: st.stats for qid, st in states.items()},
        discarded=discarded, elapsed_ms=elapsed,
    )
