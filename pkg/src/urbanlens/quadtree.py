"""Quadtree-backed exact K-nearest-neighbor queries and the adaptive spatial lens.

Points are inserted once at build time; the index is immutable afterwards and
safe to share across request handlers. KNN is exact: results are ordered by
ascending Euclidean distance in projected space, ties broken by ascending item
id, so identical inputs always produce identical outputs.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .geo import GeoPoint, ProjectedPoint, project

DEFAULT_LEAF_CAPACITY = 16
DEFAULT_MAX_DEPTH = 24


@dataclass(frozen=True)
class LensResult:
    """Lens answer: member ids by ascending distance and the brush radius in meters.

    The radius is the distance from the query point to the last member; 0 when
    there are no members.
    """

    members: list[int] = field(default_factory=list)
    radius: float = 0.0


class _Node:
    __slots__ = ("min_x", "min_y", "max_x", "max_y", "depth", "items", "children")

    def __init__(self, min_x, min_y, max_x, max_y, depth):
        self.min_x = min_x
        self.min_y = min_y
        self.max_x = max_x
        self.max_y = max_y
        self.depth = depth
        self.items: list[tuple[float, float, int]] | None = []
        self.children: list[_Node] | None = None

    def box_dist_sq(self, qx: float, qy: float) -> float:
        dx = 0.0
        if qx < self.min_x:
            dx = self.min_x - qx
        elif qx > self.max_x:
            dx = qx - self.max_x
        dy = 0.0
        if qy < self.min_y:
            dy = self.min_y - qy
        elif qy > self.max_y:
            dy = qy - self.max_y
        return dx * dx + dy * dy

    def subdivide(self) -> None:
        cx = (self.min_x + self.max_x) / 2.0
        cy = (self.min_y + self.max_y) / 2.0
        d = self.depth + 1
        self.children = [
            _Node(self.min_x, self.min_y, cx, cy, d),
            _Node(cx, self.min_y, self.max_x, cy, d),
            _Node(self.min_x, cy, cx, self.max_y, d),
            _Node(cx, cy, self.max_x, self.max_y, d),
        ]
        for item in self.items:  # type: ignore[union-attr]
            self.children[self.quadrant(item[0], item[1])].items.append(item)
        self.items = None

    def quadrant(self, x: float, y: float) -> int:
        cx = (self.min_x + self.max_x) / 2.0
        cy = (self.min_y + self.max_y) / 2.0
        return (1 if x >= cx else 0) | (2 if y >= cy else 0)


class QuadTree:
    """Immutable spatial index over (ProjectedPoint, item id) pairs."""

    def __init__(
        self,
        origin: GeoPoint,
        capacity: int = DEFAULT_LEAF_CAPACITY,
        max_depth: int = DEFAULT_MAX_DEPTH,
    ):
        if capacity < 1:
            raise ValueError("leaf capacity must be >= 1")
        self.origin = origin
        self.capacity = capacity
        self.max_depth = max_depth
        self._root: _Node | None = None
        self._count = 0

    def __len__(self) -> int:
        return self._count

    def _insert(self, x: float, y: float, item_id: int) -> None:
        node = self._root
        while node.children is not None:
            node = node.children[node.quadrant(x, y)]
        node.items.append((x, y, item_id))
        if len(node.items) > self.capacity and node.depth < self.max_depth:
            node.subdivide()

    def leaf_sizes(self) -> Iterator[tuple[int, int]]:
        """Yield (depth, item count) per leaf, for invariant checks."""
        if self._root is None:
            return
        stack = [self._root]
        while stack:
            node = stack.pop()
            if node.children is None:
                yield node.depth, len(node.items)
            else:
                stack.extend(node.children)

    def knn(self, q: ProjectedPoint, k: int) -> LensResult:
        """Exact k nearest stored items to ``q``; k > N returns all N."""
        if k < 0:
            raise ValueError("k must be >= 0")
        if k == 0 or self._count == 0:
            return LensResult([], 0.0)
        qx, qy = q.x, q.y
        # best: max-heap of (-dist_sq, -id); its root is the current worst member
        best: list[tuple[float, int]] = []
        counter = 0
        frontier = [(0.0, counter, self._root)]
        while frontier:
            box_d2, _, node = heapq.heappop(frontier)
            # Strict: a box at exactly the worst distance may still hold an
            # equal-distance item with a lower id.
            if len(best) == k and box_d2 > -best[0][0]:
                break
            if node.children is None:
                for x, y, item_id in node.items:
                    dx = x - qx
                    dy = y - qy
                    d2 = dx * dx + dy * dy
                    if len(best) < k:
                        heapq.heappush(best, (-d2, -item_id))
                    elif (d2, item_id) < (-best[0][0], -best[0][1]):
                        heapq.heapreplace(best, (-d2, -item_id))
            else:
                worst_d2 = -best[0][0] if len(best) == k else math.inf
                for child in node.children:
                    cd2 = child.box_dist_sq(qx, qy)
                    if cd2 <= worst_d2:
                        counter += 1
                        heapq.heappush(frontier, (cd2, counter, child))
        members = sorted((-nd2, -nid) for nd2, nid in best)
        radius = math.sqrt(members[-1][0]) if members else 0.0
        return LensResult([m[1] for m in members], radius)

    def query_radius(self, q: ProjectedPoint, radius: float) -> list[int]:
        """Ids of all items within ``radius`` meters (inclusive), ascending id."""
        if self._count == 0 or radius < 0:
            return []
        qx, qy = q.x, q.y
        r2 = radius * radius
        out: list[int] = []
        stack = [self._root]
        while stack:
            node = stack.pop()
            if node.box_dist_sq(qx, qy) > r2:
                continue
            if node.children is None:
                for x, y, item_id in node.items:
                    dx = x - qx
                    dy = y - qy
                    if dx * dx + dy * dy <= r2:
                        out.append(item_id)
            else:
                stack.extend(node.children)
        out.sort()
        return out

    def lens(self, cursor: GeoPoint, k: int) -> LensResult:
        """Project the cursor and return the k-nearest lens around it."""
        return self.knn(project(cursor, self.origin), k)


def build_index(
    points: Iterable[tuple[GeoPoint, int]],
    origin: GeoPoint,
    capacity: int = DEFAULT_LEAF_CAPACITY,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> QuadTree:
    """Build an index over geographic points; an empty input is a valid empty index."""
    projected = [(project(p, origin), item_id) for p, item_id in points]
    return build_index_projected(projected, origin, capacity, max_depth)


def build_index_projected(
    points: list[tuple[ProjectedPoint, int]],
    origin: GeoPoint,
    capacity: int = DEFAULT_LEAF_CAPACITY,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> QuadTree:
    """Build an index from already-projected points (same origin as the tree)."""
    tree = QuadTree(origin, capacity=capacity, max_depth=max_depth)
    if not points:
        return tree
    xs = [p.x for p, _ in points]
    ys = [p.y for p, _ in points]
    pad = 1.0
    tree._root = _Node(min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad, 0)
    for p, item_id in points:
        tree._insert(p.x, p.y, item_id)
    tree._count = len(points)
    return tree
