"""Geometric kernel: dominance tests, the Omega_0 transform, midpoints and MBB corners.

Every engine and every brute-force oracle is built on the predicates in this
module. All values are plain tuples of floats and every function is pure.

Two families of predicates live here:

* the folded (Omega_0) predicates ``transform``, ``midpoint``, ``dominates``,
  ``corner_set`` and ``rect_fully_dominated`` which reason on absolute offsets
  from a query point, and
* the orthant-aware ``DominanceRegion`` used by the engines for pruning. Folding
  loses the side of q a point lies on; a product on the opposite side of q from
  a customer can never dominate q for that customer, so every pruning decision
  goes through a region that keeps per-side thresholds.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

Coords = Tuple[float, ...]

INF = math.inf


class GeometryError(ValueError):
    """Raised for malformed points, rects or mismatched dimensionality."""
    pass


def _sign(value: float) -> int:
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


@dataclass(frozen=True)
class Point:
    """A D-dimensional attribute vector: a product, customer or candidate."""

    coords: Coords
    id: int = 0

    def __post_init__(self):
        coords = tuple(float(v) for v in self.coords)
        if len(coords) < 2:
            raise GeometryError(f"Point {self.id} needs at least 2 dimensions, got {len(coords)}")
        if not all(math.isfinite(v) for v in coords):
            raise GeometryError(f"Point {self.id} has non-finite coordinates: {coords}")
        object.__setattr__(self, "coords", coords)

    @property
    def dimension(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class TransformedPoint:
    """Absolute per-dimension offsets from a query point.

    ``orthant`` records the side of the query point each offset came from
    (-1, 0 or +1). When omitted it is derived from the coordinates, which makes
    a bare TransformedPoint behave as if it lay in the positive orthant.
    """

    coords: Coords
    orthant: Optional[Tuple[int, ...]] = field(default=None, compare=True)

    def __post_init__(self):
        coords = tuple(float(v) for v in self.coords)
        if any(v < 0 or not math.isfinite(v) for v in coords):
            raise GeometryError(f"Transformed coordinates must be finite and >= 0: {coords}")
        object.__setattr__(self, "coords", coords)
        if self.orthant is None:
            object.__setattr__(self, "orthant", tuple(_sign(v) for v in coords))
        elif len(self.orthant) != len(coords):
            raise GeometryError("orthant and coords differ in length")

    @property
    def dimension(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Rect:
    """Minimum bounding box with per-dimension low/high bounds."""

    lo: Coords
    hi: Coords

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi):
            raise GeometryError(f"Rect bounds differ in dimension: {len(lo)} vs {len(hi)}")
        if any(a > b for a, b in zip(lo, hi)):
            raise GeometryError(f"Rect has lo > hi: lo={lo} hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dimension(self) -> int:
        return len(self.lo)

    @classmethod
    def of_point(cls, coords: Sequence[float]) -> "Rect":
        c = tuple(coords)
        return cls(c, c)

    @classmethod
    def bounding(cls, rects: Iterable["Rect"]) -> "Rect":
        """Tightest rect enclosing every rect given."""
        rects = list(rects)
        if not rects:
            raise GeometryError("Cannot bound an empty collection of rects")
        lo = tuple(min(vals) for vals in zip(*(r.lo for r in rects)))
        hi = tuple(max(vals) for vals in zip(*(r.hi for r in rects)))
        return cls(lo, hi)

    def contains_point(self, coords: Sequence[float]) -> bool:
        return all(a <= v <= b for a, v, b in zip(self.lo, coords, self.hi))

    def contains_rect(self, other: "Rect") -> bool:
        return all(a <= c and d <= b for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))


@dataclass(frozen=True)
class CornerSet:
    """Min-corner and the D minmax-corners of an MBB, in transformed space."""

    min_corner: TransformedPoint
    minmax_corners: Tuple[TransformedPoint, ...]


PointLike = Union[Point, TransformedPoint, Sequence[float]]


def _coords(x: PointLike) -> Coords:
    if isinstance(x, (Point, TransformedPoint)):
        return x.coords
    return tuple(x)


def _check_dims(a: Sequence[float], b: Sequence[float]) -> None:
    if len(a) != len(b):
        raise GeometryError(f"Dimension mismatch: {len(a)} vs {len(b)}")


def offsets(x: PointLike, q: PointLike) -> Coords:
    """Signed offsets x - q."""
    xc, qc = _coords(x), _coords(q)
    _check_dims(xc, qc)
    return tuple(a - b for a, b in zip(xc, qc))


def transform(x: PointLike, q: PointLike) -> TransformedPoint:
    """Map x to Omega_0 with respect to q: per-dimension |x_i - q_i|.

    Raises:
        GeometryError: If x and q differ in dimensionality
    """
    d = offsets(x, q)
    return TransformedPoint(tuple(abs(v) for v in d), tuple(_sign(v) for v in d))


def midpoint(x: TransformedPoint) -> TransformedPoint:
    """Halve a transformed offset vector (the midpoint between q and x)."""
    if not isinstance(x, TransformedPoint):
        x = TransformedPoint(tuple(x))
    return TransformedPoint(tuple(v / 2.0 for v in x.coords), x.orthant)


def dominates(a: PointLike, b: PointLike) -> bool:
    """True iff a_i <= b_i for all i and a_j < b_j for at least one j."""
    ac, bc = _coords(a), _coords(b)
    _check_dims(ac, bc)
    strict = False
    for u, v in zip(ac, bc):
        if u > v:
            return False
        if u < v:
            strict = True
    return strict


def dynamically_dominates(p: PointLike, p2: PointLike, c: PointLike) -> bool:
    """True iff p dynamically dominates p2 with respect to c."""
    pc, p2c, cc = _coords(p), _coords(p2), _coords(c)
    _check_dims(pc, cc)
    _check_dims(p2c, cc)
    strict = False
    for u, v, w in zip(pc, p2c, cc):
        du = abs(u - w)
        dv = abs(v - w)
        if du > dv:
            return False
        if du < dv:
            strict = True
    return strict


def mindist(r: Rect, q: PointLike) -> float:
    """Euclidean distance from q to the nearest point of r."""
    qc = _coords(q)
    _check_dims(r.lo, qc)
    total = 0.0
    for a, b, v in zip(r.lo, r.hi, qc):
        if v < a:
            total += (a - v) ** 2
        elif v > b:
            total += (v - b) ** 2
    return math.sqrt(total)


def corner_set(r: Rect, q: PointLike) -> CornerSet:
    """Min-corner and minmax-corners of r in Omega_0 with respect to q."""
    qc = _coords(q)
    _check_dims(r.lo, qc)
    mins: List[float] = []
    min_signs: List[int] = []
    maxs: List[float] = []
    max_signs: List[int] = []
    for a, b, v in zip(r.lo, r.hi, qc):
        lo_off, hi_off = a - v, b - v
        if lo_off <= 0 <= hi_off:
            mins.append(0.0)
            min_signs.append(0)
        elif lo_off > 0:
            mins.append(lo_off)
            min_signs.append(1)
        else:
            mins.append(-hi_off)
            min_signs.append(-1)
        if abs(hi_off) >= abs(lo_off):
            maxs.append(abs(hi_off))
            max_signs.append(_sign(hi_off))
        else:
            maxs.append(abs(lo_off))
            max_signs.append(_sign(lo_off))

    min_corner = TransformedPoint(tuple(mins), tuple(min_signs))
    corners = []
    for j in range(len(qc)):
        coords = tuple(mins[k] if k == j else maxs[k] for k in range(len(qc)))
        signs = tuple(min_signs[k] if k == j else max_signs[k] for k in range(len(qc)))
        corners.append(TransformedPoint(coords, signs))
    return CornerSet(min_corner, tuple(corners))


def rect_fully_dominated(m: TransformedPoint, r: Rect, q: PointLike) -> bool:
    """True iff m dominates the min-corner of r in Omega_0.

    Folded test: orthants are ignored, so it only decides pruning for rects in
    the same orthant as the product behind m. The engines use
    ``DominanceRegion.contains_rect`` instead.
    """
    return dominates(m, corner_set(r, q).min_corner)


def guaranteed_witnesses(r: Rect, q: PointLike) -> List[TransformedPoint]:
    """Pessimistic corners of r that some real point of r is at least as close as.

    Each face of an MBB touches at least one indexed point. For dimension j the
    face nearest q holds a point whose offset is exact in j and bounded by the
    farthest offset elsewhere, provided the rect lies on one side of q in every
    other dimension. For a rect lying in one orthant these are exactly the
    minmax corners of ``corner_set``; a dimension straddling q yields one witness
    per side.
    """
    qc = _coords(q)
    _check_dims(r.lo, qc)
    lo_off = [a - v for a, v in zip(r.lo, qc)]
    hi_off = [b - v for b, v in zip(r.hi, qc)]
    dims = len(qc)

    far: List[Optional[Tuple[float, int]]] = []
    for lo, hi in zip(lo_off, hi_off):
        if lo > 0:
            far.append((hi, 1))
        elif hi < 0:
            far.append((-lo, -1))
        elif lo == hi == 0:
            far.append((0.0, 0))
        else:
            far.append(None)

    witnesses: List[TransformedPoint] = []
    for j in range(dims):
        if any(far[k] is None for k in range(dims) if k != j):
            continue
        lo, hi = lo_off[j], hi_off[j]
        if lo > 0:
            faces = [lo]
        elif hi < 0:
            faces = [hi]
        else:
            faces = [lo, hi] if lo != hi else [lo]
        for face in faces:
            coords = []
            signs = []
            for k in range(dims):
                if k == j:
                    coords.append(abs(face))
                    signs.append(_sign(face))
                else:
                    coords.append(far[k][0])
                    signs.append(far[k][1])
            witnesses.append(TransformedPoint(tuple(coords), tuple(signs)))
    return witnesses


class DominanceRegion:
    """Orthant-aware set of customer offsets excluded by one or more products.

    Per dimension the region keeps four thresholds on the signed customer
    offset x = c_i - q_i:

        plus_closed  x >= t  admissible on the + side
        plus_open    x >  t  strict on the + side
        minus_closed -x >= t admissible on the - side
        minus_open   -x >  t strict on the - side

    ``inf`` marks a side that is not admissible. A customer offset belongs to
    the region iff every dimension is admissible and at least one is strict.
    """

    __slots__ = ("plus_closed", "plus_open", "minus_closed", "minus_open")

    def __init__(self, plus_closed: Coords, plus_open: Coords,
                 minus_closed: Coords, minus_open: Coords):
        self.plus_closed = plus_closed
        self.plus_open = plus_open
        self.minus_closed = minus_closed
        self.minus_open = minus_open

    @classmethod
    def from_midpoint(cls, m: TransformedPoint) -> "DominanceRegion":
        """Exact region of the product whose midpoint is m."""
        pc, po, mc, mo = [], [], [], []
        for v, s in zip(m.coords, m.orthant):
            if s > 0 and v > 0:
                pc.append(v); po.append(v); mc.append(INF); mo.append(INF)
            elif s < 0 and v > 0:
                pc.append(INF); po.append(INF); mc.append(v); mo.append(v)
            else:
                pc.append(0.0); po.append(INF); mc.append(0.0); mo.append(INF)
        return cls(tuple(pc), tuple(po), tuple(mc), tuple(mo))

    @classmethod
    def from_offsets(cls, d: Sequence[float]) -> "DominanceRegion":
        """Exact region of a product at signed offset d from q."""
        return cls.from_midpoint(TransformedPoint(tuple(abs(v) / 2.0 for v in d),
                                                  tuple(_sign(v) for v in d)))

    @classmethod
    def from_rect(cls, r: Rect, q: PointLike) -> "DominanceRegion":
        """Union of the regions of every point r may contain (optimistic bound)."""
        qc = _coords(q)
        _check_dims(r.lo, qc)
        pc, po, mc, mo = [], [], [], []
        for a, b, v in zip(r.lo, r.hi, qc):
            lo, hi = a - v, b - v
            if lo > 0:
                half = lo / 2.0
                pc.append(half); po.append(half); mc.append(INF); mo.append(INF)
            elif hi < 0:
                half = -hi / 2.0
                pc.append(INF); po.append(INF); mc.append(half); mo.append(half)
            else:
                pc.append(0.0)
                po.append(0.0 if hi > 0 else INF)
                mc.append(0.0)
                mo.append(0.0 if lo < 0 else INF)
        return cls(tuple(pc), tuple(po), tuple(mc), tuple(mo))

    def contains_offsets(self, x: Sequence[float]) -> bool:
        """Membership of a single customer at signed offset x."""
        strict = False
        for xi, pc, po, mc, mo in zip(x, self.plus_closed, self.plus_open,
                                      self.minus_closed, self.minus_open):
            if xi > 0:
                if xi < pc:
                    return False
                if xi > po:
                    strict = True
            elif xi < 0:
                ax = -xi
                if ax < mc:
                    return False
                if ax > mo:
                    strict = True
            elif pc > 0 and mc > 0:
                return False
        return strict

    def contains_point(self, c: PointLike, q: PointLike) -> bool:
        return self.contains_offsets(offsets(c, q))

    def contains_rect(self, r: Rect, q: PointLike) -> bool:
        """True iff every point of r belongs to the region."""
        qc = _coords(q)
        strict = False
        for a, b, v, pc, po, mc, mo in zip(r.lo, r.hi, qc, self.plus_closed, self.plus_open,
                                           self.minus_closed, self.minus_open):
            lo, hi = a - v, b - v
            if lo >= pc:
                if lo > po:
                    strict = True
            elif -hi >= mc:
                if -hi > mo:
                    strict = True
            elif not (pc == 0 and mc == 0):
                return False
        return strict

    def subsumes(self, other: "DominanceRegion") -> bool:
        """Sufficient test that other is contained in this region."""
        for a, b in ((self.plus_closed, other.plus_closed), (self.plus_open, other.plus_open),
                     (self.minus_closed, other.minus_closed), (self.minus_open, other.minus_open)):
            for u, v in zip(a, b):
                if u > v:
                    return False
        return True

    def strictly_subsumes(self, other: "DominanceRegion") -> bool:
        return self.subsumes(other) and self != other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DominanceRegion):
            return NotImplemented
        return (self.plus_closed == other.plus_closed and self.plus_open == other.plus_open
                and self.minus_closed == other.minus_closed and self.minus_open == other.minus_open)

    def __hash__(self) -> int:
        return hash((self.plus_closed, self.plus_open, self.minus_closed, self.minus_open))

    def __repr__(self) -> str:
        return (f"DominanceRegion(+{self.plus_closed}/{self.plus_open}, "
                f"-{self.minus_closed}/{self.minus_open})")
