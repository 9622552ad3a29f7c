"""The fixed nine-layer roster and per-layer payload builders for the API.

Layer ids 1-9 map one-to-one onto the toggle keys "1"-"9". Derived layers
(graph, hotspots, prediction) report counts from the pipeline state.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownLayerError, UnsupportedLayerError
from .geo import GeoPoint, ProjectedPoint, project, unproject
from .quadtree import QuadTree, build_index_projected
from .streets import NodeClass
from .workspace import Workspace


@dataclass(frozen=True)
class LayerInfo:
    layer_id: int
    name: str
    kind: str  # point | arc | polygon
    icon: str

    @property
    def toggle_key(self) -> str:
        return str(self.layer_id)


LAYER_ROSTER: tuple[LayerInfo, ...] = (
    LayerInfo(1, "crime", "point", "crime"),
    LayerInfo(2, "taxi_trips", "arc", "taxi"),
    LayerInfo(3, "weather", "point", "weather"),
    LayerInfo(4, "public_transport", "point", "transport"),
    LayerInfo(5, "favelas", "polygon", "favela"),
    LayerInfo(6, "socioeconomic", "polygon", "census"),
    LayerInfo(7, "graph", "point", "graph"),
    LayerInfo(8, "hotspots", "point", "hotspot"),
    LayerInfo(9, "prediction", "polygon", "grid"),
)

_BY_ID = {info.layer_id: info for info in LAYER_ROSTER}


def layer_info(layer_id: int) -> LayerInfo:
    info = _BY_ID.get(layer_id)
    if info is None:
        raise UnknownLayerError(f"no layer with id {layer_id}", parameter="layer")
    return info


def record_count(w: Workspace, layer_id: int) -> int:
    info = layer_info(layer_id)
    if info.name == "crime":
        return len(w.crime) if w.crime else 0
    if info.name == "taxi_trips":
        if w.trips is not None:
            return len(w.trips)
        return len(w.trips_csv) if w.trips_csv else 0
    if info.name == "weather":
        return len(w.stations_raw) if w.stations_raw else 0
    if info.name == "public_transport":
        return len(w.transport) if w.transport else 0
    if info.name == "favelas":
        return len(w.favelas) if w.favelas is not None else 0
    if info.name == "socioeconomic":
        return len(w.tracts_raw) if w.tracts_raw is not None else 0
    if info.name == "graph":
        return w.graph.node_count if w.graph else 0
    if info.name == "hotspots":
        return sum(1 for h in w.hotspots if h.is_hotspot) if w.hotspots else 0
    if info.name == "prediction":
        if w.grid is None:
            return 0
        return int(((w.grid.success + w.grid.failure) > 0).sum())
    return 0


def parse_bbox(raw: str | None) -> tuple[float, float, float, float] | None:
    """'lon1,lat1,lon2,lat2' -> normalized (lon_min, lat_min, lon_max, lat_max)."""
    from .errors import BadParameterError

    if raw is None or raw == "":
        return None
    parts = raw.split(",")
    if len(parts) != 4:
        raise BadParameterError("bbox must be lon1,lat1,lon2,lat2", parameter="bbox")
    try:
        lon1, lat1, lon2, lat2 = (float(v) for v in parts)
    except ValueError:
        raise BadParameterError("bbox values must be numeric", parameter="bbox")
    return (min(lon1, lon2), min(lat1, lat2), max(lon1, lon2), max(lat1, lat2))


def _in_bbox(lat: float, lon: float, bbox) -> bool:
    if bbox is None:
        return True
    return bbox[0] <= lon <= bbox[2] and bbox[1] <= lat <= bbox[3]


def features_payload(w: Workspace, layer_id: int, bbox) -> list[dict]:
    """Records of a layer intersecting the bbox, in the layer's natural shape."""
    info = layer_info(layer_id)
    out: list[dict] = []
    if info.name == "crime" and w.crime:
        for i, (lat, lon) in enumerate(zip(w.crime.lats, w.crime.lons)):
            if _in_bbox(lat, lon, bbox):
                ts = w.crime.timestamps[i]
                out.append({
                    "id": i, "lat": lat, "lon": lon,
                    "category": w.crime.categories[i],
                    "timestamp": ts.isoformat() if ts else None,
                })
    elif info.name == "taxi_trips" and w.trips is not None and w.graph is not None:
        from .trips import PERIODS, WEEKDAYS

        g = w.graph
        t = w.trips
        origins = t.origin_nodes.tolist()
        dests = t.dest_nodes.tolist()
        periods = t.periods.tolist()
        weekdays = t.weekdays.tolist()
        months = t.months.tolist()
        labels = t.labels.tolist()
        for i, (o, d) in enumerate(zip(origins, dests)):
            o_lat, o_lon = g.node_lats[o], g.node_lons[o]
            d_lat, d_lon = g.node_lats[d], g.node_lons[d]
            if _in_bbox(o_lat, o_lon, bbox) or _in_bbox(d_lat, d_lon, bbox):
                out.append({
                    "id": i,
                    "origin": [o_lat, o_lon],
                    "dest": [d_lat, d_lon],
                    "label": "occurrence" if labels[i] else "regular",
                    "period": PERIODS[periods[i]],
                    "weekday": WEEKDAYS[weekdays[i]],
                    "month": months[i],
                })
    elif info.name == "weather" and w.stations_raw:
        for i, s in enumerate(w.stations_raw):
            if _in_bbox(s.lat, s.lon, bbox):
                out.append({
                    "id": i, "lat": s.lat, "lon": s.lon,
                    "station_id": s.station_id,
                    "series": {k: list(v) for k, v in sorted(s.series.items())},
                })
    elif info.name == "public_transport" and w.transport:
        for i, (lat, lon) in enumerate(zip(w.transport.lats, w.transport.lons)):
            if _in_bbox(lat, lon, bbox):
                out.append({"id": i, "lat": lat, "lon": lon, "category": w.transport.categories[i]})
    elif info.name == "favelas" and w.favelas is not None:
        for i, rec in enumerate(w.favelas):
            if _rings_intersect_bbox(rec.rings, bbox):
                out.append({
                    "id": i,
                    "rings": [[[lat, lon] for lat, lon in ring] for ring in rec.rings],
                    "properties": rec.properties,
                })
    elif info.name == "socioeconomic" and w.tracts_raw is not None:
        for i, rec in enumerate(w.tracts_raw):
            if _rings_intersect_bbox(rec.rings, bbox):
                out.append({
                    "id": i,
                    "rings": [[[lat, lon] for lat, lon in ring] for ring in rec.rings],
                    "properties": rec.properties,
                })
    elif info.name == "graph":
        out = graph_nodes_payload(w, bbox)
    elif info.name == "hotspots" and w.hotspots is not None and w.graph is not None:
        g = w.graph
        for h in w.hotspots:
            if not h.is_hotspot:
                continue
            lat, lon = g.node_lats[h.node], g.node_lons[h.node]
            if _in_bbox(lat, lon, bbox):
                out.append({
                    "id": h.node, "lat": lat, "lon": lon,
                    "count": h.count, "stationary_prob": h.stationary_prob,
                })
    elif info.name == "prediction" and w.grid is not None:
        out = grid_cells_payload(w, bbox)
    return out


def _rings_intersect_bbox(rings, bbox) -> bool:
    if bbox is None:
        return True
    lats = [lat for ring in rings for lat, _ in ring]
    lons = [lon for ring in rings for _, lon in ring]
    return not (
        max(lons) < bbox[0] or min(lons) > bbox[2]
        or max(lats) < bbox[1] or min(lats) > bbox[3]
    )


def graph_nodes_payload(w: Workspace, bbox) -> list[dict]:
    if w.graph is None:
        return []
    g = w.graph
    classes = w.classes or [NodeClass.REGULAR] * g.node_count
    out = []
    for i in range(g.node_count):
        lat, lon = g.node_lats[i], g.node_lons[i]
        if _in_bbox(lat, lon, bbox):
            out.append({
                "id": i, "lat": lat, "lon": lon,
                "node_class": classes[i].value, "degree": g.degree(i),
            })
    return out


def grid_cells_payload(w: Workspace, bbox=None) -> list[dict]:
    grid = w.grid
    origin = w.origin
    cells = []
    for ix in range(grid.nx):
        for iy in range(grid.ny):
            s = int(grid.success[ix, iy])
            f = int(grid.failure[ix, iy])
            if s == 0 and f == 0:
                continue
            sw = unproject(ProjectedPoint(grid.min_x + ix * grid.cell_m,
                                          grid.min_y + iy * grid.cell_m), origin)
            ne = unproject(ProjectedPoint(grid.min_x + (ix + 1) * grid.cell_m,
                                          grid.min_y + (iy + 1) * grid.cell_m), origin)
            if bbox is not None and (
                ne.lon < bbox[0] or sw.lon > bbox[2] or ne.lat < bbox[1] or sw.lat > bbox[3]
            ):
                continue
            cells.append({
                "ix": ix, "iy": iy, "success": s, "failure": f,
                "bounds": {"min_lat": sw.lat, "min_lon": sw.lon,
                           "max_lat": ne.lat, "max_lon": ne.lon},
            })
    return cells


def lens_index(w: Workspace, layer_id: int) -> QuadTree:
    """Quadtree over a layer's point geometry; arcs index both endpoints."""
    info = layer_info(layer_id)
    origin = w.origin
    if origin is None:
        raise UnsupportedLayerError("projection origin not set; run `urbanlens build`")
    cfg = w.config.get("index", {})
    capacity = int(cfg.get("leaf_capacity", 16))
    max_depth = int(cfg.get("max_depth", 24))

    items: list[tuple[ProjectedPoint, int]] = []
    if info.name == "crime" and w.crime:
        for i, (lat, lon) in enumerate(zip(w.crime.lats, w.crime.lons)):
            items.append((project(GeoPoint(lat, lon), origin), i))
    elif info.name == "public_transport" and w.transport:
        for i, (lat, lon) in enumerate(zip(w.transport.lats, w.transport.lons)):
            items.append((project(GeoPoint(lat, lon), origin), i))
    elif info.name == "weather" and w.stations_raw:
        for i, s in enumerate(w.stations_raw):
            items.append((project(GeoPoint(s.lat, s.lon), origin), i))
    elif info.name == "graph" and w.graph:
        g = w.graph
        items = [(ProjectedPoint(g.node_x[i], g.node_y[i]), i) for i in range(g.node_count)]
    elif info.name == "hotspots" and w.hotspots and w.graph:
        g = w.graph
        items = [
            (ProjectedPoint(g.node_x[h.node], g.node_y[h.node]), h.node)
            for h in w.hotspots
            if h.is_hotspot
        ]
    elif info.name == "taxi_trips" and w.trips is not None and w.graph is not None:
        g = w.graph
        for i in range(len(w.trips)):
            o = int(w.trips.origin_nodes[i])
            d = int(w.trips.dest_nodes[i])
            items.append((ProjectedPoint(g.node_x[o], g.node_y[o]), i))
            items.append((ProjectedPoint(g.node_x[d], g.node_y[d]), i))
    else:
        raise UnsupportedLayerError(
            f"layer {info.name!r} has no point geometry for the spatial lens",
            parameter="layer",
        )
    return build_index_projected(items, origin, capacity=capacity, max_depth=max_depth)
