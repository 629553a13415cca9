"""Hilbert curve ordering of candidate points."""

from typing import List, Sequence

import numpy as np

from .geometry import Point


HILBERT_BITS = 16


def hilbert_index(coords: Sequence[int], bits: int = HILBERT_BITS) -> int:
    """Position of an integer grid point along the Hilbert curve.

    Uses Skilling's transpose algorithm: the axes are converted in place to the
    transposed Hilbert index, whose bits are then interleaved with the first
    axis most significant.

    Args:
        coords: Grid coordinates, each in [0, 2**bits)
        bits: Bits per dimension

    Returns:
        int: Hilbert index in [0, 2**(bits * len(coords)))
    """
    x = [int(v) for v in coords]
    n = len(x)
    top = 1 << (bits - 1)

    q = top
    while q > 1:
        p = q - 1
        for i in range(n):
            if x[i] & q:
                x[0] ^= p
            else:
                t = (x[0] ^ x[i]) & p
                x[0] ^= t
                x[i] ^= t
        q >>= 1

    for i in range(1, n):
        x[i] ^= x[i - 1]
    t = 0
    q = top
    while q > 1:
        if x[n - 1] & q:
            t ^= q - 1
        q >>= 1
    for i in range(n):
        x[i] ^= t

    index = 0
    for b in range(bits - 1, -1, -1):
        for i in range(n):
            index = (index << 1) | ((x[i] >> b) & 1)
    return index


def grid_coordinates(points: Sequence[Point], bits: int = HILBERT_BITS) -> np.ndarray:
    """Scale points onto the integer grid spanned by their bounding box.

    Each dimension is scaled independently; a dimension with zero extent maps to 0.
    """
    data = np.array([p.coords for p in points], dtype=float)
    lo = data.min(axis=0)
    extent = data.max(axis=0) - lo
    scale = np.where(extent > 0, ((1 << bits) - 1) / np.where(extent > 0, extent, 1.0), 0.0)
    grid = np.floor((data - lo) * scale)
    return np.clip(grid, 0, (1 << bits) - 1).astype(np.int64)


def hilbert_order(points: Sequence[Point], bits: int = HILBERT_BITS) -> List[Point]:
    """Points sorted by Hilbert index over their bounding box, ties by id."""
    points = list(points)
    if not points:
        return []
    grid = grid_coordinates(points, bits)
    keys = [(hilbert_index(row, bits), p.id) for row, p in zip(grid.tolist(), points)]
    order = sorted(range(len(points)), key=lambda i: keys[i])
    return [points[i] for i in order]
