"""Bulk-loaded R-tree over points with per-node identity and read accounting.

Trees are packed once with sort-tile-recursive (STR) and are immutable
afterwards. ``read_node`` is the only counted access path: each call charges
one read to the ``IoCounter`` bucket of the tree's role. The engines read
every node through it; ``RTree.node`` and ``root_node`` are uncounted and
serve instrumentation, tests and the root reference kept in the tree header.
There is no buffer pool.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import Point, Rect
from ..utils.logger import get_logger


NodeId = int

ROLES = ("product", "customer")

_PAGE_HEADER_BYTES = 32
_MIN_FANOUT = 4


class RTreeError(ValueError):
    """Raised for invalid index builds."""
    pass


class UnknownNodeError(RTreeError, KeyError):
    """Raised when a NodeId does not exist in the tree."""
    pass


@dataclass(frozen=True)
class ChildRef:
    """Reference to a child node as stored inside its parent."""

    node_id: NodeId
    rect: Rect
    level: int
    count: int


@dataclass(frozen=True)
class RTreeNode:
    """One page of the tree: child references for inner nodes, points for leaves."""

    id: NodeId
    rect: Rect
    level: int
    children: Tuple[ChildRef, ...] = ()
    points: Tuple[Point, ...] = ()
    count: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.level == 0

    @property
    def entries(self) -> tuple:
        return self.points if self.is_leaf else self.children

    def ref(self) -> ChildRef:
        return ChildRef(self.id, self.rect, self.level, self.count)


@dataclass
class IoCounter:
    """Node reads of one query, split by tree role."""

    reads_product: int = 0
    reads_customer: int = 0

    def record(self, role: str) -> None:
        if role == "product":
            self.reads_product += 1
        elif role == "customer":
            self.reads_customer += 1
        else:
            raise RTreeError(f"Unknown tree role '{role}'")

    @property
    def total(self) -> int:
        return self.reads_product + self.reads_customer


@dataclass
class RTree:
    """Height-balanced R-tree with a flat node store keyed by NodeId."""

    nodes: Dict[NodeId, RTreeNode]
    root: NodeId
    fanout: int
    dimension: int
    role: str = "product"
    size: int = field(default=0)

    @property
    def height(self) -> int:
        return self.nodes[self.root].level + 1

    @property
    def root_node(self) -> RTreeNode:
        return self.nodes[self.root]

    def node(self, node_id: NodeId) -> RTreeNode:
        """Uncounted node access for instrumentation and tests.

        Raises:
            UnknownNodeError: If the id is not part of this tree
        """
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"Node {node_id} not found in {self.role} tree")

    def iter_points(self) -> Iterator[Point]:
        """Full leaf scan in node-id order."""
        for node_id in sorted(self.nodes):
            node = self.nodes[node_id]
            if node.is_leaf:
                yield from node.points

    def iter_nodes(self) -> Iterator[RTreeNode]:
        for node_id in sorted(self.nodes):
            yield self.nodes[node_id]


class ARTree(RTree):
    """R-tree whose nodes carry the number of points in their subtree."""

    def count(self, node_id: NodeId) -> int:
        return self.node(node_id).count


def default_fanout(dimension: int, page_bytes: int = 4096) -> int:
    """Entries per page: 2*D 8-byte bounds plus an 8-byte id, after a 32-byte header.

    Raises:
        RTreeError: If page_bytes is below 256
    """
    if page_bytes < 256:
        raise RTreeError(f"page_bytes must be >= 256, got {page_bytes}")
    return max(_MIN_FANOUT, (page_bytes - _PAGE_HEADER_BYTES) // (16 * dimension + 8))


def read_node(tree: RTree, node_id: NodeId, counter: IoCounter) -> RTreeNode:
    """Fetch a node and charge exactly one read to the tree's role."""
    node = tree.node(node_id)
    counter.record(tree.role)
    return node


def _ceil_root(n: int, k: int) -> int:
    """Smallest integer r with r**k >= n."""
    r = max(1, int(round(n ** (1.0 / k))))
    while r ** k < n:
        r += 1
    while r > 1 and (r - 1) ** k >= n:
        r -= 1
    return r


def _str_groups(centers: np.ndarray, ties: np.ndarray, fanout: int) -> List[np.ndarray]:
    """Partition rows into pages of at most ``fanout`` by sort-tile-recursive.

    Rows are sorted on one dimension at a time, ties broken by ``ties``, and cut
    into slabs of whole pages before recursing on the next dimension.
    """
    dims = centers.shape[1]

    def tile(idx: np.ndarray, dim: int) -> List[np.ndarray]:
        order = idx[np.lexsort((ties[idx], centers[idx, dim]))]
        pages = -(-len(order) // fanout)
        if dim == dims - 1 or pages <= 1:
            return [order[i:i + fanout] for i in range(0, len(order), fanout)]
        slabs = _ceil_root(pages, dims - dim)
        slab_size = fanout * -(-pages // slabs)
        groups: List[np.ndarray] = []
        for start in range(0, len(order), slab_size):
            groups.extend(tile(order[start:start + slab_size], dim + 1))
        return groups

    return tile(np.arange(len(centers)), 0)


def _pack(points: Sequence[Point], fanout: int, role: str, tree_cls: type) -> RTree:
    logger = get_logger(__name__)

    points = list(points)
    if not points:
        raise RTreeError("Cannot build an R-tree over an empty point set")
    if fanout < 2:
        raise RTreeError(f"fanout must be >= 2, got {fanout}")
    if role not in ROLES:
        raise RTreeError(f"Unknown tree role '{role}', expected one of {ROLES}")
    dimension = points[0].dimension
    if any(p.dimension != dimension for p in points):
        raise RTreeError("All points of a tree must share one dimensionality")

    coords = np.array([p.coords for p in points], dtype=float)
    ids = np.array([p.id for p in points], dtype=np.int64)

    nodes: Dict[NodeId, RTreeNode] = {}
    level_refs: List[ChildRef] = []
    for group in _str_groups(coords, ids, fanout):
        block = coords[group]
        rect = Rect(tuple(block.min(axis=0).tolist()), tuple(block.max(axis=0).tolist()))
        node = RTreeNode(len(nodes), rect, 0, points=tuple(points[i] for i in group),
                         count=len(group))
        nodes[node.id] = node
        level_refs.append(node.ref())

    level = 1
    while len(level_refs) > 1:
        centers = np.array([[(a + b) / 2.0 for a, b in zip(r.rect.lo, r.rect.hi)]
                            for r in level_refs], dtype=float)
        ref_ids = np.array([r.node_id for r in level_refs], dtype=np.int64)
        next_refs: List[ChildRef] = []
        for group in _str_groups(centers, ref_ids, fanout):
            children = tuple(level_refs[i] for i in group)
            rect = Rect.bounding(c.rect for c in children)
            node = RTreeNode(len(nodes), rect, level, children=children,
                             count=sum(c.count for c in children))
            nodes[node.id] = node
            next_refs.append(node.ref())
        level_refs = next_refs
        level += 1

    tree = tree_cls(nodes=nodes, root=level_refs[0].node_id, fanout=fanout,
                    dimension=dimension, role=role, size=len(points))
    logger.debug(
        f"Built {role} {tree_cls.__name__}: {len(points)} points, {len(nodes)} nodes, "
        f"height {tree.height}, fanout {fanout}"
    )
    return tree


def bulk_load(points: Sequence[Point], fanout: int, role: str = "product") -> RTree:
    """Build an R-tree by sort-tile-recursive packing.

    Args:
        points: Build set; every point lands in exactly one leaf
        fanout: Maximum entries per node
        role: IoCounter bucket charged by reads of this tree

    Returns:
        RTree: Packed tree with leaf ids first and the root last

    Raises:
        RTreeError: If points is empty, fanout < 2 or dimensions differ
    """
    return _pack(points, fanout, role, RTree)


def build_artree(points: Sequence[Point], fanout: Optional[int] = None,
                 role: str = "customer") -> ARTree:
    """Build an aggregate-count R-tree with the same packing as bulk_load."""
    points = list(points)
    if fanout is None and points:
        fanout = default_fanout(points[0].dimension)
    return _pack(points, fanout or 0, role, ARTree)
