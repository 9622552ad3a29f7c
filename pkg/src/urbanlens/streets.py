"""Street graph construction and corner classification.

Nodes are street corners, edges the street segments connecting them. Polyline
endpoints within 0.5 m are snapped to a single node; node ids are dense
integers in insertion order, which keeps every downstream tie rule
deterministic.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum

from .geo import GeoPoint, ProjectedPoint, centroid_origin, project_xy
from .quadtree import QuadTree, build_index_projected

SNAP_TOLERANCE_M = 0.5


class NodeClass(str, Enum):
    DEAD_END = "dead_end"
    NEAR_DEAD_END = "near_dead_end"
    REGULAR = "regular"


@dataclass
class StreetGraph:
    """Undirected street graph in a fixed local projection."""

    origin: GeoPoint
    node_lats: list[float]
    node_lons: list[float]
    node_x: list[float]
    node_y: list[float]
    edges: list[tuple[int, int, float]]
    adjacency: list[list[tuple[int, float]]]
    _node_index: QuadTree | None = field(default=None, repr=False)

    @property
    def node_count(self) -> int:
        return len(self.node_x)

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def node_geo(self, node: int) -> GeoPoint:
        return GeoPoint(self.node_lats[node], self.node_lons[node])

    def node_index(self) -> QuadTree:
        """Quadtree over node positions; built once, then shared."""
        if self._node_index is None:
            pts = [
                (ProjectedPoint(self.node_x[i], self.node_y[i]), i)
                for i in range(self.node_count)
            ]
            self._node_index = build_index_projected(pts, self.origin)
        return self._node_index


def build_graph(
    streets: list[list[tuple[float, float]]],
    origin: GeoPoint | None = None,
    snap_tolerance: float = SNAP_TOLERANCE_M,
) -> StreetGraph:
    """Build the graph from polylines of (lat, lon) vertices.

    Every polyline vertex becomes a node (after snapping) and every polyline
    segment an edge with its projected Euclidean length.
    """
    if not streets or all(len(line) < 2 for line in streets):
        raise ValueError("empty street network")
    if origin is None:
        origin = centroid_origin([v for line in streets for v in line])

    node_lats: list[float] = []
    node_lons: list[float] = []
    node_x: list[float] = []
    node_y: list[float] = []
    # spatial hash for snap lookup, cell size = snap tolerance
    cell = snap_tolerance if snap_tolerance > 0 else 1.0
    buckets: dict[tuple[int, int], list[int]] = {}
    tol_sq = snap_tolerance * snap_tolerance

    def node_for(lat: float, lon: float) -> int:
        x, y = project_xy(lat, lon, origin)
        cx, cy = int(math.floor(x / cell)), int(math.floor(y / cell))
        for bx in (cx - 1, cx, cx + 1):
            for by in (cy - 1, cy, cy + 1):
                for idx in buckets.get((bx, by), ()):
                    dx = node_x[idx] - x
                    dy = node_y[idx] - y
                    if dx * dx + dy * dy <= tol_sq:
                        return idx
        idx = len(node_x)
        node_lats.append(lat)
        node_lons.append(lon)
        node_x.append(x)
        node_y.append(y)
        buckets.setdefault((cx, cy), []).append(idx)
        return idx

    edge_set: set[tuple[int, int]] = set()
    edges: list[tuple[int, int, float]] = []
    for line in streets:
        if len(line) < 2:
            continue
        ids = [node_for(lat, lon) for lat, lon in line]
        for a, b in zip(ids, ids[1:]):
            if a == b:
                continue  # zero-length segment collapsed by snapping
            key = (a, b) if a < b else (b, a)
            if key in edge_set:
                continue
            edge_set.add(key)
            length = math.hypot(node_x[a] - node_x[b], node_y[a] - node_y[b])
            edges.append((key[0], key[1], length))

    adjacency: list[list[tuple[int, float]]] = [[] for _ in node_x]
    for a, b, length in edges:
        adjacency[a].append((b, length))
        adjacency[b].append((a, length))

    return StreetGraph(origin, node_lats, node_lons, node_x, node_y, edges, adjacency)


def classify_nodes(g: StreetGraph, near_radius_m: float = 100.0) -> list[NodeClass]:
    """Classify every corner as dead end, near dead end, or regular.

    A node is a dead end if its degree is 1 or it touches a degree-1 node;
    a near dead end if some dead end lies within ``near_radius_m`` along the
    streets (Dijkstra over edge lengths); regular otherwise.
    """
    n = g.node_count
    classes = [NodeClass.REGULAR] * n
    dead: list[int] = []
    for i in range(n):
        if g.degree(i) == 1 or any(g.degree(nbr) == 1 for nbr, _ in g.adjacency[i]):
            classes[i] = NodeClass.DEAD_END
            dead.append(i)

    # multi-source Dijkstra from all dead ends, cut off at the radius
    dist = {i: 0.0 for i in dead}
    heap = [(0.0, i) for i in dead]
    heapq.heapify(heap)
    while heap:
        d, i = heapq.heappop(heap)
        if d > dist.get(i, math.inf):
            continue
        for nbr, length in g.adjacency[i]:
            nd = d + length
            if nd <= near_radius_m and nd < dist.get(nbr, math.inf):
                dist[nbr] = nd
                heapq.heappush(heap, (nd, nbr))
    for i, d in dist.items():
        if classes[i] is NodeClass.REGULAR and d <= near_radius_m:
            classes[i] = NodeClass.NEAR_DEAD_END
    return classes


def nearest_corner(g: StreetGraph, p: GeoPoint) -> int:
    """Node minimizing projected distance to ``p``; ties go to the lowest id."""
    if g.node_count == 0:
        raise ValueError("empty graph")
    result = g.node_index().lens(p, 1)
    return result.members[0]


def nearest_corner_xy(g: StreetGraph, x: float, y: float) -> int:
    result = g.node_index().knn(ProjectedPoint(x, y), 1)
    return result.members[0]
