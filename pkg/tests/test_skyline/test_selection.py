"""Tests for greedy and exhaustive candidate selection."""

import itertools
import math
import random

import pytest

from src.skyline.selection import (
    CandidateProfile,
    SelectionError,
    exhaustive_opt,
    joint_influence_score,
    kgcs,
)


def _profiles(sets):
    return [CandidateProfile(i + 1, members) for i, members in enumerate(sets)]


def _plain_greedy(profiles, k):
    covered, chosen = set(), []
    remaining = sorted(profiles, key=lambda p: p.id)
    for _ in range(k):
        best = max(remaining, key=lambda p: (len(p.influence - covered), -p.id))
        chosen.append(best.id)
        covered |= best.influence
        remaining.remove(best)
    return tuple(chosen), len(covered)


class TestJointInfluenceScore:
    """Test union cardinality."""

    def test_empty(self):
        assert joint_influence_score([]) == 0

    def test_overlap(self):
        assert joint_influence_score(_profiles([{1, 2}, {2, 3}])) == 3

    def test_disjoint(self):
        assert joint_influence_score(_profiles([{1, 2}, {3}, {4, 5, 6}])) == 6


class TestKgcs:
    """Test k-stage greedy selection."""

    def setup_method(self):
        self.example = _profiles([{1, 2}, {2, 3}, {3}])
        # RSKY(p1)={c2,c3}, RSKY(p2)={c1,c2}, RSKY(p3)={c3}, RSKY(p4)={c1}
        self.scenario = _profiles([{2, 3}, {1, 2}, {3}, {1}])

    def test_example(self):
        selection = kgcs(self.example, 2)
        assert selection.ids == (1, 2)
        assert selection.joint_score == 3
        assert selection.gains == (2, 1)

    def test_scenario(self):
        selection = kgcs(self.scenario, 2)
        assert selection.joint_score == 3
        assert selection.ids[0] == 1

    def test_select_all(self):
        selection = kgcs(self.scenario, 4)
        assert selection.joint_score == joint_influence_score(self.scenario)
        assert sorted(selection.ids) == [1, 2, 3, 4]

    def test_tie_goes_to_smallest_id(self):
        profiles = [CandidateProfile(9, {1, 2}), CandidateProfile(4, {3, 4}), CandidateProfile(6, {5})]
        assert kgcs(profiles, 1).ids == (4,)

    def test_k_out_of_range(self):
        with pytest.raises(SelectionError):
            kgcs(self.example, 0)
        with pytest.raises(SelectionError):
            kgcs(self.example, 4)

    def test_allow_short(self):
        selection = kgcs(self.example, 5, allow_short=True)
        assert len(selection.ids) == 3
        assert selection.joint_score == 3

    def test_duplicate_ids(self):
        with pytest.raises(SelectionError):
            kgcs([CandidateProfile(1, {1}), CandidateProfile(1, {2})], 1)

    def test_lazy_matches_plain_greedy(self):
        rng = random.Random(17)
        for _ in range(300):
            n = rng.randint(1, 12)
            profiles = [
                CandidateProfile(rng.randint(0, 10_000) * 20 + i,
                                 {rng.randint(0, 25) for _ in range(rng.randint(0, 10))})
                for i in range(n)
            ]
            k = rng.randint(1, n)
            selection = kgcs(profiles, k)
            assert (selection.ids, selection.joint_score) == _plain_greedy(profiles, k)

    def test_greedy_guarantee(self):
        rng = random.Random(23)
        for _ in range(500):
            n = rng.randint(1, 12)
            k = rng.randint(1, min(4, n))
            profiles = _profiles(
                [{rng.randint(0, 30) for _ in range(rng.randint(0, 12))} for _ in range(n)]
            )
            greedy = kgcs(profiles, k).joint_score
            optimum = exhaustive_opt(profiles, k).joint_score
            assert greedy >= (1 - 1 / math.e) * optimum - 1e-9
            assert greedy <= optimum


class TestExhaustiveOpt:
    """Test optimal selection by enumeration."""

    def test_example(self):
        assert exhaustive_opt(_profiles([{1, 2}, {2, 3}, {3}]), 2).joint_score == 3

    def test_scenario_optimal_pairs(self):
        profiles = _profiles([{2, 3}, {1, 2}, {3}, {1}])
        best = exhaustive_opt(profiles, 2)
        assert best.joint_score == 3
        assert best.ids == (1, 2)
        optimal_pairs = {
            tuple(p.id for p in pair)
            for pair in itertools.combinations(profiles, 2)
            if joint_influence_score(pair) == 3
        }
        assert optimal_pairs == {(1, 2), (1, 4), (2, 3)}

    def test_k_one_is_largest_set(self):
        profiles = _profiles([{1}, {1, 2, 3}, {4, 5}])
        assert exhaustive_opt(profiles, 1).ids == (2,)

    def test_identical_sets(self):
        profiles = _profiles([{1, 2}, {1, 2}, {1, 2}])
        assert exhaustive_opt(profiles, 2).joint_score == 2

    def test_guard(self):
        profiles = _profiles([{i} for i in range(30)])
        with pytest.raises(SelectionError, match="kgcs"):
            exhaustive_opt(profiles, 10, guard=1000)

    def test_k_out_of_range(self):
        with pytest.raises(SelectionError):
            exhaustive_opt(_profiles([{1}]), 2)
