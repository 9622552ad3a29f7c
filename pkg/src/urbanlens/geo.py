"""WGS-84 coordinates and the local planar projection used for all metric rules.

The engine works in a local equirectangular projection about a fixed origin
(typically the dataset centroid): good to well under 0.5 % over a ~50 km city,
and it keeps quadtree pruning exact because distances stay Euclidean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_M = 6_371_000.0
_DEG = math.pi / 180.0


@dataclass(frozen=True)
class GeoPoint:
    """A WGS-84 coordinate (degrees)."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"latitude out of range: {self.lat}")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class ProjectedPoint:
    """Meters east (x) and north (y) of the projection origin."""

    x: float
    y: float


def project(p: GeoPoint, origin: GeoPoint) -> ProjectedPoint:
    """Equirectangular projection of ``p`` about ``origin``."""
    k = EARTH_RADIUS_M * _DEG
    x = k * (p.lon - origin.lon) * math.cos(origin.lat * _DEG)
    y = k * (p.lat - origin.lat)
    return ProjectedPoint(x, y)


def unproject(p: ProjectedPoint, origin: GeoPoint) -> GeoPoint:
    """Inverse of :func:`project` for the same origin."""
    k = EARTH_RADIUS_M * _DEG
    lat = origin.lat + p.y / k
    lon = origin.lon + p.x / (k * math.cos(origin.lat * _DEG))
    return GeoPoint(lat, lon)


def project_xy(lat: float, lon: float, origin: GeoPoint) -> tuple[float, float]:
    """Projection without dataclass wrapping, for bulk loops."""
    k = EARTH_RADIUS_M * _DEG
    return (
        k * (lon - origin.lon) * math.cos(origin.lat * _DEG),
        k * (lat - origin.lat),
    )


def centroid_origin(points: list[tuple[float, float]]) -> GeoPoint:
    """Mean lat/lon of (lat, lon) pairs; the default projection origin."""
    if not points:
        raise ValueError("cannot take centroid of no points")
    lat = sum(p[0] for p in points) / len(points)
    lon = sum(p[1] for p in points) / len(points)
    return GeoPoint(lat, lon)
