"""Planar polygon primitives: containment, boundary distance, centroid.

All functions work on projected (x, y) meters. A polygon is a list of parts;
each part is its exterior ring as a vertex list without the closing duplicate.
"""

from __future__ import annotations

import math

Ring = list[tuple[float, float]]


def point_in_ring(x: float, y: float, ring: Ring) -> bool:
    """Even-odd ray casting; boundary points are resolved by distance checks."""
    inside = False
    n = len(ring)
    j = n - 1
    for i in range(n):
        xi, yi = ring[i]
        xj, yj = ring[j]
        if (yi > y) != (yj > y):
            x_cross = (xj - xi) * (y - yi) / (yj - yi) + xi
            if x < x_cross:
                inside = not inside
        j = i
    return inside


def segment_dist_sq(x: float, y: float, ax: float, ay: float, bx: float, by: float) -> float:
    dx = bx - ax
    dy = by - ay
    len_sq = dx * dx + dy * dy
    if len_sq == 0.0:
        ex = x - ax
        ey = y - ay
        return ex * ex + ey * ey
    t = ((x - ax) * dx + (y - ay) * dy) / len_sq
    t = min(1.0, max(0.0, t))
    ex = x - (ax + t * dx)
    ey = y - (ay + t * dy)
    return ex * ex + ey * ey


def ring_boundary_dist(x: float, y: float, ring: Ring) -> float:
    best = math.inf
    n = len(ring)
    j = n - 1
    for i in range(n):
        d = segment_dist_sq(x, y, ring[j][0], ring[j][1], ring[i][0], ring[i][1])
        if d < best:
            best = d
        j = i
    return math.sqrt(best)


def polygon_distance(x: float, y: float, parts: list[Ring]) -> float:
    """Distance from a point to a polygon; 0 for interior points."""
    for ring in parts:
        if point_in_ring(x, y, ring):
            return 0.0
    return min(ring_boundary_dist(x, y, ring) for ring in parts)


def ring_area(ring: Ring) -> float:
    """Signed shoelace area."""
    a = 0.0
    n = len(ring)
    j = n - 1
    for i in range(n):
        a += ring[j][0] * ring[i][1] - ring[i][0] * ring[j][1]
        j = i
    return a / 2.0


def polygon_centroid(parts: list[Ring]) -> tuple[float, float]:
    """Area-weighted centroid; falls back to the vertex mean for degenerate rings."""
    cx_total = 0.0
    cy_total = 0.0
    area_total = 0.0
    for ring in parts:
        a = ring_area(ring)
        if a == 0.0:
            continue
        cx = 0.0
        cy = 0.0
        n = len(ring)
        j = n - 1
        for i in range(n):
            cross = ring[j][0] * ring[i][1] - ring[i][0] * ring[j][1]
            cx += (ring[j][0] + ring[i][0]) * cross
            cy += (ring[j][1] + ring[i][1]) * cross
            j = i
        cx_total += cx / 6.0
        cy_total += cy / 6.0
        area_total += a
    if area_total == 0.0:
        verts = [v for ring in parts for v in ring]
        return (
            sum(v[0] for v in verts) / len(verts),
            sum(v[1] for v in verts) / len(verts),
        )
    return cx_total / area_total, cy_total / area_total


def rings_bbox(parts: list[Ring]) -> tuple[float, float, float, float]:
    xs = [v[0] for ring in parts for v in ring]
    ys = [v[1] for ring in parts for v in ring]
    return min(xs), min(ys), max(xs), max(ys)
