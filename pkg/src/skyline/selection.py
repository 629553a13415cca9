"""Max-coverage selection of k candidates from their influence sets."""

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Sequence, Tuple


DEFAULT_EXHAUSTIVE_GUARD = 1_000_000


class SelectionError(ValueError):
    """Raised for invalid k or an enumeration that would be too large."""
    pass


@dataclass(frozen=True)
class CandidateProfile:
    """A candidate id with its influence set RSKY(q)."""

    id: int
    influence: FrozenSet[int]

    def __post_init__(self):
        object.__setattr__(self, "influence", frozenset(self.influence))

    @property
    def score(self) -> int:
        return len(self.influence)


@dataclass(frozen=True)
class Selection:
    """Chosen candidate ids in pick order with their joint influence score."""

    ids: Tuple[int, ...]
    joint_score: int
    gains: Tuple[int, ...] = ()
    elapsed_ms: float = field(default=0.0, compare=False)


def joint_influence_score(profiles: Iterable[CandidateProfile]) -> int:
    """Cardinality of the union of the given influence sets."""
    covered = set()
    for profile in profiles:
        covered |= profile.influence
    return len(covered)


def _check_profiles(profiles: Sequence[CandidateProfile]) -> None:
    ids = [p.id for p in profiles]
    if len(ids) != len(set(ids)):
        raise SelectionError("Candidate ids must be unique")


def kgcs(profiles: Sequence[CandidateProfile], k: int, allow_short: bool = False) -> Selection:
    """k-stage greedy selection for maximum coverage.

    Each stage picks the candidate adding the most uncovered customers, ties
    going to the smallest id. Marginal gains are re-evaluated lazily: a
    candidate's stale gain is an upper bound of its current one, so it is only
    recomputed when it reaches the top of the heap.

    Args:
        profiles: Candidates with their influence sets
        k: Number of candidates to pick
        allow_short: Return fewer than k picks instead of failing when there
            are fewer than k profiles

    Returns:
        Selection: Picks in stage order, the joint score and per-stage gains

    Raises:
        SelectionError: If k is out of range or ids repeat
    """
    started = time.perf_counter()
    profiles = list(profiles)
    _check_profiles(profiles)
    if k < 1 or (k > len(profiles) and not allow_short):
        raise SelectionError(f"k must be in [1, {len(profiles)}], got {k}")

    heap = [(-p.score, p.id, i) for i, p in enumerate(profiles)]
    heapq.heapify(heap)
    covered = set()
    chosen: List[int] = []
    gains: List[int] = []
    while heap and len(chosen) < k:
        _, pid, i = heapq.heappop(heap)
        gain = len(profiles[i].influence - covered)
        if not heap or (-gain, pid) <= heap[0][:2]:
            chosen.append(pid)
            gains.append(gain)
            covered |= profiles[i].influence
        else:
            heapq.heappush(heap, (-gain, pid, i))

    return Selection(tuple(chosen), len(covered), tuple(gains),
                     (time.perf_counter() - started) * 1000.0)


def exhaustive_opt(profiles: Sequence[CandidateProfile], k: int,
                   guard: int = DEFAULT_EXHAUSTIVE_GUARD) -> Selection:
    """Optimal k-subset by enumeration; the lexicographically smallest among ties.

    Raises:
        SelectionError: If k is out of range or C(|profiles|, k) exceeds guard
    """
    started = time.perf_counter()
    profiles = sorted(profiles, key=lambda p: p.id)
    _check_profiles(profiles)
    if k < 1 or k > len(profiles):
        raise SelectionError(f"k must be in [1, {len(profiles)}], got {k}")
    subsets = math.comb(len(profiles), k)
    if subsets > guard:
        raise SelectionError(
            f"{subsets} subsets exceed the exhaustive guard of {guard}; use kgcs instead"
        )

    best: Tuple[CandidateProfile, ...] = ()
    best_score = -1
    for combo in itertools.combinations(profiles, k):
        score = joint_influence_score(combo)
        if score > best_score:
            best, best_score = combo, score

    return Selection(tuple(p.id for p in best), best_score, (),
                     (time.perf_counter() - started) * 1000.0)
