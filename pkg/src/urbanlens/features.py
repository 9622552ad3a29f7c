"""Aggregation of every thematic layer into per-node feature values.

Each street corner gets 26 numeric features, grouped into eight thematic
layers; a trip vector later concatenates origin and destination rows into 52
values. All radius rules are inclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Ring, polygon_distance, rings_bbox
from .quadtree import QuadTree, build_index_projected
from .geo import GeoPoint, ProjectedPoint
from .hotspots import HotspotResult
from .streets import NodeClass, StreetGraph

TRANSPORT_CATEGORIES = ("bus_stop", "terminal", "subway", "train")

SOCIO_FIELDS = (
    "income",
    "householder_income",
    "unemployment",
    "literacy_7_15",
    "pct_under_18",
    "pct_18_65",
    "pct_over_65",
)

CRIME_TYPES = ("vehicle_theft", "phone_theft")

# 26 per-node features, grouped by thematic layer. Origin+destination
# concatenation yields the 52-dimensional trip vector.
FEATURE_NAMES: tuple[str, ...] = (
    "vehicle_theft_count",
    "phone_theft_count",
    "pickup_count",
    "dropoff_count",
    "tmax_c",
    "tmin_c",
    "precip_mm",
    "bus_stop_count",
    "terminal_count",
    "subway_count",
    "train_count",
    "favela_flag",
    *SOCIO_FIELDS,
    "class_dead_end",
    "class_near_dead_end",
    "class_regular",
    "node_degree",
    "hotspot_stationary_prob",
    "hotspot_count",
    "hotspot_flag",
)

THEMATIC_LAYERS = (
    "crime",
    "trips",
    "weather",
    "transport",
    "favelas",
    "socioeconomic",
    "graph",
    "hotspots",
)

FEATURE_LAYER: dict[str, str] = {
    "vehicle_theft_count": "crime",
    "phone_theft_count": "crime",
    "pickup_count": "trips",
    "dropoff_count": "trips",
    "tmax_c": "weather",
    "tmin_c": "weather",
    "precip_mm": "weather",
    "bus_stop_count": "transport",
    "terminal_count": "transport",
    "subway_count": "transport",
    "train_count": "transport",
    "favela_flag": "favelas",
    **{f: "socioeconomic" for f in SOCIO_FIELDS},
    "class_dead_end": "graph",
    "class_near_dead_end": "graph",
    "class_regular": "graph",
    "node_degree": "graph",
    "hotspot_stationary_prob": "hotspots",
    "hotspot_count": "hotspots",
    "hotspot_flag": "hotspots",
}

assert len(FEATURE_NAMES) == 26
assert set(FEATURE_LAYER) == set(FEATURE_NAMES)


@dataclass
class WeatherStation:
    station_id: str
    x: float
    y: float
    # month key "YYYY-MM" -> (tmax_c, tmin_c, precip_mm)
    series: dict[str, tuple[float, float, float]]


@dataclass
class CensusTract:
    rings: list[Ring]
    values: tuple[float, ...]  # the 7 socioeconomic indicators
    population: float
    bbox: tuple[float, float, float, float] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if len(self.values) != len(SOCIO_FIELDS):
            raise ValueError(f"expected {len(SOCIO_FIELDS)} indicator values")
        if self.bbox is None:
            self.bbox = rings_bbox(self.rings)


@dataclass
class FeatureTable:
    """Dense node-by-feature matrix with the fixed 26-column schema."""

    values: np.ndarray  # (n_nodes, 26) float64
    names: tuple[str, ...] = FEATURE_NAMES

    def row(self, node: int) -> np.ndarray:
        return self.values[node]

    def as_dict(self, node: int) -> dict[str, float]:
        return dict(zip(self.names, self.values[node].tolist()))

    @property
    def node_count(self) -> int:
        return int(self.values.shape[0])


def _bbox_dist(x: float, y: float, bbox: tuple[float, float, float, float]) -> float:
    dx = max(bbox[0] - x, 0.0, x - bbox[2])
    dy = max(bbox[1] - y, 0.0, y - bbox[3])
    return math.hypot(dx, dy)


def build_facility_index(
    facilities: list[tuple[float, float, str]], origin: GeoPoint
) -> tuple[QuadTree, list[str]]:
    pts = [(ProjectedPoint(x, y), i) for i, (x, y, _) in enumerate(facilities)]
    return build_index_projected(pts, origin), [c for _, _, c in facilities]


def radius_count(
    g: StreetGraph,
    facilities: list[tuple[float, float, str]],
    node: int,
    radius_m: float = 200.0,
    _index: tuple[QuadTree, list[str]] | None = None,
) -> dict[str, int]:
    """Count facilities per category within ``radius_m`` (inclusive) of a node."""
    counts = {c: 0 for c in TRANSPORT_CATEGORIES}
    if not facilities:
        return counts
    index, categories = _index if _index is not None else build_facility_index(facilities, g.origin)
    q = ProjectedPoint(g.node_x[node], g.node_y[node])
    for item in index.query_radius(q, radius_m):
        cat = categories[item]
        if cat in counts:
            counts[cat] += 1
    return counts


def favela_flag(
    g: StreetGraph,
    node: int,
    polygons: list[list[Ring]],
    radius_m: float = 500.0,
) -> int:
    """1 iff the node is within ``radius_m`` of any settlement polygon (0 inside counts)."""
    x, y = g.node_x[node], g.node_y[node]
    for parts in polygons:
        if _bbox_dist(x, y, rings_bbox(parts)) > radius_m:
            continue
        if polygon_distance(x, y, parts) <= radius_m:
            return 1
    return 0


def census_assign(
    g: StreetGraph,
    node: int,
    tracts: list[CensusTract],
    epsilon_m: float = 1.0,
) -> tuple[float, ...]:
    """Indicator values for a node.

    The containing tract wins; a node within ``epsilon_m`` of several tracts
    gets the arithmetic mean of all of them; a node in no tract gets the
    nearest tract by boundary distance (ties to the lowest tract index).
    """
    if not tracts:
        raise ValueError("missing layer: socioeconomic (no census tracts)")
    x, y = g.node_x[node], g.node_y[node]
    within: list[int] = []
    best_idx = 0
    best_dist = math.inf
    for i, tract in enumerate(tracts):
        lower = _bbox_dist(x, y, tract.bbox)
        if lower > epsilon_m and lower >= best_dist:
            continue
        d = polygon_distance(x, y, tract.rings)
        if d <= epsilon_m:
            within.append(i)
        if d < best_dist:
            best_dist = d
            best_idx = i
    if within:
        vals = np.mean([tracts[i].values for i in within], axis=0)
        return tuple(float(v) for v in vals)
    return tracts[best_idx].values


def idw_weather(
    g: StreetGraph,
    node: int,
    stations: list[WeatherStation],
    month: str,
) -> tuple[float, float, float]:
    """Inverse-distance interpolation of the three stations' values at ``month``.

    A node effectively at a station (< 1 m) gets that station's values exactly.
    """
    if len(stations) != 3:
        raise ValueError(f"expected exactly 3 weather stations, got {len(stations)}")
    missing = [s.station_id for s in stations if month not in s.series]
    if missing:
        raise ValueError(f"weather month {month} missing at station(s): {', '.join(missing)}")
    x, y = g.node_x[node], g.node_y[node]
    dists = [math.hypot(x - s.x, y - s.y) for s in stations]
    for d, s in zip(dists, stations):
        if d < 1.0:
            return s.series[month]
    weights = [1.0 / d for d in dists]
    total = sum(weights)
    out = [0.0, 0.0, 0.0]
    for w, s in zip(weights, stations):
        vals = s.series[month]
        for j in range(3):
            out[j] += w * vals[j]
    return (out[0] / total, out[1] / total, out[2] / total)


def aggregate_all(
    g: StreetGraph,
    classes: list[NodeClass],
    *,
    crime_nodes: list[int],
    crime_types: list[str],
    facilities: list[tuple[float, float, str]],
    favela_polygons: list[list[Ring]],
    tracts: list[CensusTract],
    stations: list[WeatherStation],
    months: list[str],
    hotspots: list[HotspotResult],
    trip_origin_nodes,
    trip_dest_nodes,
    transport_radius_m: float = 200.0,
    favela_radius_m: float = 500.0,
    census_epsilon_m: float = 1.0,
) -> FeatureTable:
    """Build the complete 26-feature table; every node gets every field.

    Raises if a required layer is absent (``None``): features are never
    silently zeroed. Empty-but-loaded layers (e.g. a city with no settlement
    polygons) are legitimate.
    """
    required = {
        "crime": crime_nodes,
        "transport": facilities,
        "favelas": favela_polygons,
        "socioeconomic": tracts,
        "weather": stations,
        "hotspots": hotspots,
        "trips": trip_origin_nodes,
        "graph classification": classes,
    }
    for name, value in required.items():
        if value is None:
            raise ValueError(f"missing layer: {name}")
    n = g.node_count
    if len(classes) != n or len(hotspots) != n:
        raise ValueError("classification/hotspot results must cover every node")

    col = {name: i for i, name in enumerate(FEATURE_NAMES)}
    out = np.zeros((n, len(FEATURE_NAMES)), dtype=np.float64)

    for node, kind in zip(crime_nodes, crime_types):
        if kind == "vehicle_theft":
            out[node, col["vehicle_theft_count"]] += 1
        elif kind == "phone_theft":
            out[node, col["phone_theft_count"]] += 1
        else:
            raise ValueError(f"unknown crime type: {kind}")

    for node in trip_origin_nodes:
        out[node, col["pickup_count"]] += 1
    for node in trip_dest_nodes:
        out[node, col["dropoff_count"]] += 1

    if not months:
        raise ValueError("missing layer: weather (no analysis months)")
    for node in range(n):
        acc = [0.0, 0.0, 0.0]
        for month in months:
            vals = idw_weather(g, node, stations, month)
            for j in range(3):
                acc[j] += vals[j]
        out[node, col["tmax_c"]] = acc[0] / len(months)
        out[node, col["tmin_c"]] = acc[1] / len(months)
        out[node, col["precip_mm"]] = acc[2] / len(months)

    fac_index = build_facility_index(facilities, g.origin) if facilities else None
    for node in range(n):
        if fac_index is not None:
            counts = radius_count(g, facilities, node, transport_radius_m, _index=fac_index)
            for cat in TRANSPORT_CATEGORIES:
                out[node, col[f"{cat}_count"]] = counts[cat]
        out[node, col["favela_flag"]] = favela_flag(g, node, favela_polygons, favela_radius_m)
        socio = census_assign(g, node, tracts, census_epsilon_m)
        for name, value in zip(SOCIO_FIELDS, socio):
            out[node, col[name]] = value
        out[node, col["class_dead_end"]] = 1.0 if classes[node] is NodeClass.DEAD_END else 0.0
        out[node, col["class_near_dead_end"]] = 1.0 if classes[node] is NodeClass.NEAR_DEAD_END else 0.0
        out[node, col["class_regular"]] = 1.0 if classes[node] is NodeClass.REGULAR else 0.0
        out[node, col["node_degree"]] = g.degree(node)
        h = hotspots[node]
        out[node, col["hotspot_stationary_prob"]] = h.stationary_prob
        out[node, col["hotspot_count"]] = h.count
        out[node, col["hotspot_flag"]] = 1.0 if h.is_hotspot else 0.0

    if not np.isfinite(out).all():
        raise ValueError("aggregation produced non-finite feature values")
    return FeatureTable(out)
