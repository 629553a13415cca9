"""Tests for the geometric kernel."""

import math
import random

import pytest

from src.skyline.geometry import (
    DominanceRegion,
    GeometryError,
    Point,
    Rect,
    TransformedPoint,
    corner_set,
    dominates,
    dynamically_dominates,
    guaranteed_witnesses,
    midpoint,
    mindist,
    offsets,
    rect_fully_dominated,
    transform,
)


class TestPoint:
    """Test Point validation."""

    def test_valid_point(self):
        p = Point((1, 2, 3), id=7)
        assert p.coords == (1.0, 2.0, 3.0)
        assert p.dimension == 3
        assert p.id == 7

    def test_rejects_one_dimension(self):
        with pytest.raises(GeometryError):
            Point((1,))

    def test_rejects_non_finite(self):
        with pytest.raises(GeometryError):
            Point((1.0, math.nan))
        with pytest.raises(GeometryError):
            Point((math.inf, 1.0))

    def test_transformed_point_rejects_negative(self):
        with pytest.raises(GeometryError):
            TransformedPoint((-1.0, 2.0))


class TestTransform:
    """Test transform and midpoint."""

    def test_query_at_origin(self):
        assert transform(Point((4, 2)), Point((0, 0))).coords == (4.0, 2.0)

    def test_arithmetic(self):
        t = transform(Point((6, 14)), Point((10, 10)))
        assert t.coords == (4.0, 4.0)
        assert t.orthant == (-1, 1)

    def test_identity(self):
        assert transform(Point((3, 3)), Point((3, 3))).coords == (0.0, 0.0)

    def test_dimension_mismatch(self):
        with pytest.raises(GeometryError):
            transform(Point((1, 2)), Point((1, 2, 3)))

    def test_midpoint(self):
        assert midpoint(TransformedPoint((4, 2))).coords == (2.0, 1.0)
        assert midpoint(TransformedPoint((0, 0))).coords == (0.0, 0.0)
        assert midpoint(TransformedPoint((3, 5, 7))).coords == (1.5, 2.5, 3.5)

    def test_midpoint_keeps_orthant(self):
        t = transform(Point((0, 10)), Point((4, 4)))
        assert midpoint(t).orthant == (-1, 1)


class TestDominance:
    """Test static and dynamic dominance."""

    def test_dominates(self):
        assert dominates((1, 1), (3, 3))
        assert not dominates((2, 2), (2, 2))
        assert not dominates((1, 3), (3, 1))
        assert dominates((1, 3), (1, 4))

    def test_dynamically_dominates(self):
        c = Point((5, 5))
        assert dynamically_dominates(Point((4, 4)), Point((2, 2)), c)
        assert not dynamically_dominates(Point((4, 6)), Point((6, 4)), c)
        assert not dynamically_dominates(Point((4, 4)), Point((4, 4)), c)

    def test_dominates_is_a_strict_order(self):
        rng = random.Random(17)
        for _ in range(3000):
            dims = rng.choice((2, 3, 4))
            a, b, c = (tuple(rng.randint(0, 3) for _ in range(dims)) for _ in range(3))
            assert not dominates(a, a)
            assert not (dominates(a, b) and dominates(b, a))
            if dominates(a, b) and dominates(b, c):
                assert dominates(a, c)

    def test_folded_midpoint_ignores_orthant(self):
        # product left of q, customer right of q
        q = Point((10, 10))
        p = Point((8, 8))
        c = Point((20, 20))
        m = midpoint(transform(p, q))
        assert dominates(m, transform(c, q))
        assert not DominanceRegion.from_midpoint(m).contains_point(c, q)
        assert not dynamically_dominates(p, q, c)

    def test_midpoint_region_matches_definition(self):
        rng = random.Random(7)
        for _ in range(3000):
            dims = rng.choice((2, 3))
            p, q, c = (Point(tuple(rng.randint(0, 6) for _ in range(dims))) for _ in range(3))
            region = DominanceRegion.from_midpoint(midpoint(transform(p, q)))
            assert region.contains_point(c, q) == dynamically_dominates(p, q, c)


class TestRect:
    """Test rects, mindist and corner sets."""

    def setup_method(self):
        self.rect = Rect((4, 4), (8, 8))

    def test_rejects_inverted_bounds(self):
        with pytest.raises(GeometryError):
            Rect((2, 2), (1, 3))

    def test_bounding(self):
        r = Rect.bounding([Rect((0, 5), (1, 6)), Rect((3, 1), (4, 2))])
        assert r == Rect((0, 1), (4, 6))
        assert r.contains_rect(Rect((0, 5), (1, 6)))
        assert r.contains_point((2, 3))
        assert not r.contains_point((5, 3))

    def test_mindist(self):
        assert mindist(self.rect, (0, 0)) == pytest.approx(math.sqrt(32))
        assert mindist(self.rect, (5, 5)) == 0.0
        assert mindist(self.rect, (6, 10)) == 2.0

    def test_corner_set_outside(self):
        cs = corner_set(self.rect, Point((0, 0)))
        assert cs.min_corner.coords == (4.0, 4.0)
        assert {c.coords for c in cs.minmax_corners} == {(4.0, 8.0), (8.0, 4.0)}

    def test_corner_set_query_inside(self):
        cs = corner_set(self.rect, Point((5, 5)))
        assert cs.min_corner.coords == (0.0, 0.0)
        assert {c.coords for c in cs.minmax_corners} == {(0.0, 3.0), (3.0, 0.0)}

    def test_corner_set_degenerate(self):
        p = Point((3, 9))
        q = Point((5, 5))
        cs = corner_set(Rect.of_point(p.coords), q)
        assert cs.min_corner == transform(p, q)
        assert all(c == transform(p, q) for c in cs.minmax_corners)


class TestRectDominance:
    """Test rect-level dominance and pruning predicates."""

    def setup_method(self):
        self.rect = Rect((4, 4), (8, 8))
        self.q = Point((0, 0))

    def test_rect_fully_dominated(self):
        assert rect_fully_dominated(TransformedPoint((1, 1)), self.rect, self.q)
        assert not rect_fully_dominated(TransformedPoint((4, 4)), self.rect, self.q)
        assert not rect_fully_dominated(TransformedPoint((5, 1)), self.rect, self.q)

    def test_rect_fully_dominated_ignores_side_of_q(self):
        m = TransformedPoint((1.95, 2.37))
        rect = Rect((7.64, 2.55), (9.12, 3.90))
        assert rect_fully_dominated(m, rect, Point((1.34, 8.47)))
        assert rect_fully_dominated(TransformedPoint((1, 1), (-1, -1)), self.rect, self.q)

    def test_rect_fully_dominated_is_min_corner_dominance(self):
        rng = random.Random(23)
        for _ in range(2000):
            q = Point((rng.uniform(0, 10), rng.uniform(0, 10)))
            lo = (rng.uniform(0, 10), rng.uniform(0, 10))
            rect = Rect(lo, (lo[0] + rng.uniform(0, 3), lo[1] + rng.uniform(0, 3)))
            m = TransformedPoint((rng.uniform(0, 6), rng.uniform(0, 6)))
            expected = dominates(m, corner_set(rect, q).min_corner)
            assert rect_fully_dominated(m, rect, q) == expected
            if expected:
                inside = Point((rng.uniform(rect.lo[0], rect.hi[0]), rng.uniform(rect.lo[1], rect.hi[1])))
                assert dominates(m, transform(inside, q))

    def test_guaranteed_witnesses_one_orthant(self):
        witnesses = guaranteed_witnesses(self.rect, self.q)
        corners = corner_set(self.rect, self.q).minmax_corners
        assert set(witnesses) == set(corners)

    def test_guaranteed_witnesses_straddling(self):
        # x straddles q, y lies above it: one witness per x face
        witnesses = guaranteed_witnesses(Rect((-2, 3), (4, 5)), Point((0, 0)))
        coords = {(w.coords, w.orthant) for w in witnesses}
        assert ((2.0, 5.0), (-1, 1)) in coords
        assert ((4.0, 5.0), (1, 1)) in coords

    def test_guaranteed_witnesses_straddling_two_dimensions(self):
        assert guaranteed_witnesses(Rect((-1, -1), (1, 1)), Point((0, 0))) == []


class TestDominanceRegion:
    """Test DominanceRegion membership against the definition."""

    def test_from_offsets_matches_definition(self):
        rng = random.Random(11)
        for _ in range(2000):
            q = Point((rng.randint(0, 6), rng.randint(0, 6)))
            p = Point((rng.randint(0, 6), rng.randint(0, 6)))
            c = Point((rng.randint(0, 6), rng.randint(0, 6)))
            region = DominanceRegion.from_offsets(offsets(p, q))
            assert region.contains_point(c, q) == dynamically_dominates(p, q, c)

    def test_rect_region_is_optimistic(self):
        rng = random.Random(3)
        q = Point((5, 5))
        for _ in range(300):
            lo = (rng.randint(0, 9), rng.randint(0, 9))
            hi = (lo[0] + rng.randint(0, 4), lo[1] + rng.randint(0, 4))
            rect = Rect(lo, hi)
            region = DominanceRegion.from_rect(rect, q)
            p = Point((rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1])))
            assert region.subsumes(DominanceRegion.from_offsets(offsets(p, q)))

    def test_contains_rect_implies_every_point(self):
        rng = random.Random(5)
        q = Point((0, 0))
        for _ in range(300):
            m = TransformedPoint((rng.uniform(0, 5), rng.uniform(0, 5)),
                                 (rng.choice((-1, 1)), rng.choice((-1, 1))))
            lo = (rng.uniform(-10, 10), rng.uniform(-10, 10))
            rect = Rect(lo, (lo[0] + rng.uniform(0, 3), lo[1] + rng.uniform(0, 3)))
            region = DominanceRegion.from_midpoint(m)
            if region.contains_rect(rect, q):
                for corner in ((rect.lo[0], rect.lo[1]), (rect.hi[0], rect.hi[1]),
                               (rect.lo[0], rect.hi[1]), (rect.hi[0], rect.lo[1])):
                    assert region.contains_offsets(corner)

    def test_subsumes(self):
        near = DominanceRegion.from_midpoint(TransformedPoint((1, 1)))
        far = DominanceRegion.from_midpoint(TransformedPoint((2, 3)))
        assert near.subsumes(far)
        assert near.strictly_subsumes(far)
        assert not far.subsumes(near)
        assert near.subsumes(near)
        assert not near.strictly_subsumes(near)

    def test_equality_and_hash(self):
        a = DominanceRegion.from_midpoint(TransformedPoint((1, 2)))
        b = DominanceRegion.from_midpoint(TransformedPoint((1, 2)))
        assert a == b
        assert len({a, b}) == 1
