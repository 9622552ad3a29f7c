"""Synthetic ride-hailing trip generation with a controlled class imbalance.

Origin and destination tracts are drawn independently with probability
proportional to population; each tract's endpoint is the street corner nearest
its centroid. Trips with an endpoint within the hotspot radius may be labeled
``occurrence``, with the per-trip probability calibrated on a pilot pass so the
expected occurrence:regular ratio is about 1:90.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .features import CensusTract
from .geometry import polygon_centroid
from .geo import ProjectedPoint
from .hotspots import HotspotResult
from .quadtree import build_index_projected
from .streets import StreetGraph, nearest_corner_xy

PERIODS = ("morning", "afternoon", "night", "dawn")
WEEKDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")

# more samples in working hours, fewer on weekends
DEFAULT_PERIOD_WEIGHTS = (0.30, 0.35, 0.25, 0.10)
DEFAULT_WEEKDAY_WEIGHTS = (0.155,) * 5 + (0.1125,) * 2

LABEL_REGULAR = 0
LABEL_OCCURRENCE = 1


@dataclass(frozen=True)
class TripRecord:
    origin_node: int
    dest_node: int
    period: str
    weekday: str
    month: int
    label: str  # "regular" | "occurrence"


@dataclass
class TripTable:
    """Column-oriented trip storage; rows are materialized on demand."""

    origin_nodes: np.ndarray
    dest_nodes: np.ndarray
    periods: np.ndarray  # index into PERIODS
    weekdays: np.ndarray  # index into WEEKDAYS
    months: np.ndarray  # 1..12
    labels: np.ndarray  # 0 regular / 1 occurrence
    warning: str | None = None

    def __len__(self) -> int:
        return int(self.origin_nodes.shape[0])

    def record(self, i: int) -> TripRecord:
        return TripRecord(
            origin_node=int(self.origin_nodes[i]),
            dest_node=int(self.dest_nodes[i]),
            period=PERIODS[self.periods[i]],
            weekday=WEEKDAYS[self.weekdays[i]],
            month=int(self.months[i]),
            label="occurrence" if self.labels[i] == LABEL_OCCURRENCE else "regular",
        )

    @property
    def occurrence_count(self) -> int:
        return int(self.labels.sum())


def tract_endpoint_nodes(g: StreetGraph, tracts: list[CensusTract]) -> list[int]:
    """Street corner nearest each tract's area centroid."""
    nodes = []
    for tract in tracts:
        cx, cy = polygon_centroid(tract.rings)
        nodes.append(nearest_corner_xy(g, cx, cy))
    return nodes


def nodes_near_hotspots(
    g: StreetGraph, nodes: list[int], hotspots: list[HotspotResult], radius_m: float
) -> np.ndarray:
    """Boolean per entry of ``nodes``: within ``radius_m`` of some hotspot node."""
    hot = [h.node for h in hotspots if h.is_hotspot]
    if not hot:
        return np.zeros(len(nodes), dtype=bool)
    index = build_index_projected(
        [(ProjectedPoint(g.node_x[h], g.node_y[h]), h) for h in hot], g.origin
    )
    out = np.zeros(len(nodes), dtype=bool)
    for i, node in enumerate(nodes):
        q = ProjectedPoint(g.node_x[node], g.node_y[node])
        res = index.knn(q, 1)
        out[i] = bool(res.members) and res.radius <= radius_m
    return out


def synth_trips(
    g: StreetGraph,
    tracts: list[CensusTract],
    hotspots: list[HotspotResult],
    n: int = 87_000,
    seed: int = 7,
    ratio_denominator: int = 91,
    hotspot_radius_m: float = 500.0,
    period_weights: tuple[float, ...] = DEFAULT_PERIOD_WEIGHTS,
    weekday_weights: tuple[float, ...] = DEFAULT_WEEKDAY_WEIGHTS,
) -> TripTable:
    """Generate ``n`` trips; deterministic for a fixed seed.

    Occurrence labels appear only on trips with an endpoint within
    ``hotspot_radius_m`` of a hotspot node. The Bernoulli probability is
    calibrated against the realized count of such trips so the expected
    occurrence share is 1/``ratio_denominator``.
    """
    if not tracts:
        raise ValueError("no census tracts to sample from")
    populations = np.array([t.population for t in tracts], dtype=np.float64)
    if populations.sum() <= 0:
        raise ValueError("total tract population must be positive")
    weights = populations / populations.sum()

    endpoint_nodes = np.array(tract_endpoint_nodes(g, tracts), dtype=np.int64)
    near = nodes_near_hotspots(g, list(endpoint_nodes), hotspots, hotspot_radius_m)
    has_hotspots = any(h.is_hotspot for h in hotspots)

    rng = np.random.default_rng(seed)
    origin_tracts = rng.choice(len(tracts), size=n, p=weights)
    dest_tracts = rng.choice(len(tracts), size=n, p=weights)
    origin_nodes = endpoint_nodes[origin_tracts]
    dest_nodes = endpoint_nodes[dest_tracts]

    labels = np.zeros(n, dtype=np.int8)
    warning = None
    near_trip = near[origin_tracts] | near[dest_tracts]
    m = int(near_trip.sum())
    if not has_hotspots:
        warning = "no hotspot nodes detected; all trips labeled regular"
    elif m > 0:
        p = min(1.0, (n / ratio_denominator) / m)
        draws = rng.random(m)
        labels[near_trip] = (draws < p).astype(np.int8)

    period_p = np.asarray(period_weights, dtype=np.float64)
    weekday_p = np.asarray(weekday_weights, dtype=np.float64)
    if not math.isclose(period_p.sum(), 1.0, abs_tol=1e-9):
        raise ValueError("period weights must sum to 1")
    if not math.isclose(weekday_p.sum(), 1.0, abs_tol=1e-9):
        raise ValueError("weekday weights must sum to 1")
    periods = rng.choice(len(PERIODS), size=n, p=period_p)
    weekdays = rng.choice(len(WEEKDAYS), size=n, p=weekday_p)
    months = rng.integers(1, 13, size=n)

    return TripTable(
        origin_nodes=origin_nodes,
        dest_nodes=dest_nodes,
        periods=periods.astype(np.int8),
        weekdays=weekdays.astype(np.int8),
        months=months.astype(np.int8),
        labels=labels,
        warning=warning,
    )
