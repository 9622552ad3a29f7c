"""The single persisted artifact: raw layers, derived state, and reports.

Saved as one versioned gzip JSON file so `serve` never rebuilds anything.
Floats survive the JSON round trip bit-exactly (shortest-repr encoding), and
derived indexes are rebuilt deterministically from the stored state, so a
reloaded workspace answers every query identically.
"""

from __future__ import annotations

import gzip
import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np

from .analytics import CorrelationReport, ShapleyReport
from .boosting import GBTModel
from .errors import StageMissingError, WorkspaceError, WorkspaceVersionError
from .geo import GeoPoint
from .hotspots import HotspotResult
from .ingest import PointDataset, PolygonRecord, StationRecord, TripsCsv
from .prediction import PredictionGrid
from .streets import NodeClass, StreetGraph
from .trips import TripTable

WORKSPACE_FORMAT = "urbanlens-workspace"
WORKSPACE_VERSION = 1

STAGE_ORDER = ("ingest", "build", "synth_trips", "train", "analyze")
STAGE_COMMANDS = {
    "ingest": "ingest",
    "build": "build",
    "synth_trips": "synth-trips",
    "train": "train",
    "analyze": "analyze",
}


@dataclass
class Workspace:
    config: dict
    stages: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    origin: GeoPoint | None = None
    # raw ingested layers
    streets: list[list[tuple[float, float]]] | None = None
    crime: PointDataset | None = None
    transport: PointDataset | None = None
    favelas: list[PolygonRecord] | None = None
    tracts_raw: list[PolygonRecord] | None = None
    stations_raw: list[StationRecord] | None = None
    trips_csv: TripsCsv | None = None
    # derived state
    graph: StreetGraph | None = None
    classes: list[NodeClass] | None = None
    crime_nodes: list[int] | None = None
    hotspots: list[HotspotResult] | None = None
    trips: TripTable | None = None
    features: np.ndarray | None = None  # (n_nodes, 26)
    model: GBTModel | None = None
    evaluation: dict | None = None
    grid: PredictionGrid | None = None
    correlation: CorrelationReport | None = None
    shapley: ShapleyReport | None = None

    def has_stage(self, stage: str) -> bool:
        return stage in self.stages

    def require_stage(self, stage: str) -> None:
        if not self.has_stage(stage):
            raise StageMissingError(stage, STAGE_COMMANDS[stage])

    def mark_stage(self, stage: str) -> None:
        if stage not in self.stages:
            self.stages.append(stage)


def _point_dataset_dict(ds: PointDataset) -> dict:
    return {
        "lats": ds.lats,
        "lons": ds.lons,
        "timestamps": [t.isoformat() if t else None for t in ds.timestamps],
        "categories": ds.categories,
        "warnings": ds.warnings,
    }


def _point_dataset_from(d: dict) -> PointDataset:
    return PointDataset(
        lats=[float(v) for v in d["lats"]],
        lons=[float(v) for v in d["lons"]],
        timestamps=[datetime.fromisoformat(t) if t else None for t in d["timestamps"]],
        categories=d["categories"],
        warnings=d["warnings"],
    )


def _polygon_records_dict(records: list[PolygonRecord]) -> list[dict]:
    return [
        {"rings": [[[lat, lon] for lat, lon in ring] for ring in r.rings], "properties": r.properties}
        for r in records
    ]


def _polygon_records_from(items: list[dict]) -> list[PolygonRecord]:
    return [
        PolygonRecord(
            rings=[[(float(lat), float(lon)) for lat, lon in ring] for ring in d["rings"]],
            properties=d["properties"],
        )
        for d in items
    ]


def _graph_dict(g: StreetGraph) -> dict:
    return {
        "origin": {"lat": g.origin.lat, "lon": g.origin.lon},
        "node_lats": g.node_lats,
        "node_lons": g.node_lons,
        "node_x": g.node_x,
        "node_y": g.node_y,
        "edges": [[a, b, length] for a, b, length in g.edges],
    }


def _graph_from(d: dict) -> StreetGraph:
    edges = [(int(a), int(b), float(length)) for a, b, length in d["edges"]]
    node_x = [float(v) for v in d["node_x"]]
    adjacency: list[list[tuple[int, float]]] = [[] for _ in node_x]
    for a, b, length in edges:
        adjacency[a].append((b, length))
        adjacency[b].append((a, length))
    return StreetGraph(
        origin=GeoPoint(d["origin"]["lat"], d["origin"]["lon"]),
        node_lats=[float(v) for v in d["node_lats"]],
        node_lons=[float(v) for v in d["node_lons"]],
        node_x=node_x,
        node_y=[float(v) for v in d["node_y"]],
        edges=edges,
        adjacency=adjacency,
    )


def _trip_table_dict(t: TripTable) -> dict:
    return {
        "origin_nodes": t.origin_nodes.tolist(),
        "dest_nodes": t.dest_nodes.tolist(),
        "periods": t.periods.tolist(),
        "weekdays": t.weekdays.tolist(),
        "months": t.months.tolist(),
        "labels": t.labels.tolist(),
        "warning": t.warning,
    }


def _trip_table_from(d: dict) -> TripTable:
    return TripTable(
        origin_nodes=np.asarray(d["origin_nodes"], dtype=np.int64),
        dest_nodes=np.asarray(d["dest_nodes"], dtype=np.int64),
        periods=np.asarray(d["periods"], dtype=np.int8),
        weekdays=np.asarray(d["weekdays"], dtype=np.int8),
        months=np.asarray(d["months"], dtype=np.int8),
        labels=np.asarray(d["labels"], dtype=np.int8),
        warning=d.get("warning"),
    )


def _grid_dict(g: PredictionGrid) -> dict:
    return {
        "cell_m": g.cell_m,
        "min_x": g.min_x,
        "min_y": g.min_y,
        "nx": g.nx,
        "ny": g.ny,
        "success": g.success.tolist(),
        "failure": g.failure.tolist(),
    }


def _grid_from(d: dict) -> PredictionGrid:
    return PredictionGrid(
        cell_m=float(d["cell_m"]),
        min_x=float(d["min_x"]),
        min_y=float(d["min_y"]),
        nx=int(d["nx"]),
        ny=int(d["ny"]),
        success=np.asarray(d["success"], dtype=np.int64),
        failure=np.asarray(d["failure"], dtype=np.int64),
    )


def workspace_to_dict(w: Workspace) -> dict:
    return {
        "format": WORKSPACE_FORMAT,
        "version": WORKSPACE_VERSION,
        "config": w.config,
        "stages": w.stages,
        "warnings": w.warnings,
        "origin": {"lat": w.origin.lat, "lon": w.origin.lon} if w.origin else None,
        "streets": w.streets,
        "crime": _point_dataset_dict(w.crime) if w.crime else None,
        "transport": _point_dataset_dict(w.transport) if w.transport else None,
        "favelas": _polygon_records_dict(w.favelas) if w.favelas is not None else None,
        "tracts": _polygon_records_dict(w.tracts_raw) if w.tracts_raw is not None else None,
        "stations": [
            {"station_id": s.station_id, "lat": s.lat, "lon": s.lon,
             "series": {k: list(v) for k, v in s.series.items()}}
            for s in w.stations_raw
        ] if w.stations_raw is not None else None,
        "trips_csv": {
            "origin_lats": w.trips_csv.origin_lats,
            "origin_lons": w.trips_csv.origin_lons,
            "dest_lats": w.trips_csv.dest_lats,
            "dest_lons": w.trips_csv.dest_lons,
            "periods": w.trips_csv.periods,
            "weekdays": w.trips_csv.weekdays,
            "months": w.trips_csv.months,
            "labels": w.trips_csv.labels,
            "warnings": w.trips_csv.warnings,
        } if w.trips_csv is not None else None,
        "graph": _graph_dict(w.graph) if w.graph else None,
        "classes": [c.value for c in w.classes] if w.classes is not None else None,
        "crime_nodes": w.crime_nodes,
        "hotspots": [
            {"node": h.node, "a": h.p_stay_active, "b": h.p_turn_active,
             "pi": h.stationary_prob, "is_hotspot": h.is_hotspot, "count": h.count}
            for h in w.hotspots
        ] if w.hotspots is not None else None,
        "trips": _trip_table_dict(w.trips) if w.trips is not None else None,
        "features": w.features.tolist() if w.features is not None else None,
        "model": w.model.to_dict() if w.model is not None else None,
        "evaluation": w.evaluation,
        "grid": _grid_dict(w.grid) if w.grid is not None else None,
        "correlation": w.correlation.to_dict() if w.correlation is not None else None,
        "shapley": w.shapley.to_dict() if w.shapley is not None else None,
    }


def workspace_from_dict(d: dict) -> Workspace:
    if d.get("format") != WORKSPACE_FORMAT:
        raise WorkspaceError("not a workspace file")
    if d.get("version") != WORKSPACE_VERSION:
        raise WorkspaceVersionError(
            f"workspace version {d.get('version')} unsupported "
            f"(expected {WORKSPACE_VERSION}); re-run the pipeline to migrate"
        )
    w = Workspace(config=d["config"], stages=list(d["stages"]), warnings=list(d["warnings"]))
    if d.get("origin"):
        w.origin = GeoPoint(d["origin"]["lat"], d["origin"]["lon"])
    if d.get("streets") is not None:
        w.streets = [[(float(lat), float(lon)) for lat, lon in line] for line in d["streets"]]
    if d.get("crime") is not None:
        w.crime = _point_dataset_from(d["crime"])
    if d.get("transport") is not None:
        w.transport = _point_dataset_from(d["transport"])
    if d.get("favelas") is not None:
        w.favelas = _polygon_records_from(d["favelas"])
    if d.get("tracts") is not None:
        w.tracts_raw = _polygon_records_from(d["tracts"])
    if d.get("stations") is not None:
        w.stations_raw = [
            StationRecord(
                station_id=s["station_id"], lat=float(s["lat"]), lon=float(s["lon"]),
                series={k: tuple(float(x) for x in v) for k, v in s["series"].items()},
            )
            for s in d["stations"]
        ]
    if d.get("trips_csv") is not None:
        t = d["trips_csv"]
        w.trips_csv = TripsCsv(
            origin_lats=[float(v) for v in t["origin_lats"]],
            origin_lons=[float(v) for v in t["origin_lons"]],
            dest_lats=[float(v) for v in t["dest_lats"]],
            dest_lons=[float(v) for v in t["dest_lons"]],
            periods=t["periods"],
            weekdays=t["weekdays"],
            months=[int(v) for v in t["months"]],
            labels=t["labels"],
            warnings=t["warnings"],
        )
    if d.get("graph") is not None:
        w.graph = _graph_from(d["graph"])
    if d.get("classes") is not None:
        w.classes = [NodeClass(v) for v in d["classes"]]
    if d.get("crime_nodes") is not None:
        w.crime_nodes = [int(v) for v in d["crime_nodes"]]
    if d.get("hotspots") is not None:
        w.hotspots = [
            HotspotResult(
                node=int(h["node"]), p_stay_active=float(h["a"]), p_turn_active=float(h["b"]),
                stationary_prob=float(h["pi"]), is_hotspot=bool(h["is_hotspot"]), count=int(h["count"]),
            )
            for h in d["hotspots"]
        ]
    if d.get("trips") is not None:
        w.trips = _trip_table_from(d["trips"])
    if d.get("features") is not None:
        w.features = np.asarray(d["features"], dtype=np.float64)
    if d.get("model") is not None:
        w.model = GBTModel.from_dict(d["model"])
    w.evaluation = d.get("evaluation")
    if d.get("grid") is not None:
        w.grid = _grid_from(d["grid"])
    if d.get("correlation") is not None:
        w.correlation = CorrelationReport.from_dict(d["correlation"])
    if d.get("shapley") is not None:
        w.shapley = ShapleyReport.from_dict(d["shapley"])
    return w


def save_workspace(w: Workspace, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with gzip.open(path, "wt", encoding="utf-8") as fh:
        json.dump(workspace_to_dict(w), fh)


def load_workspace(path: str | Path) -> Workspace:
    path = Path(path)
    if not path.exists():
        raise WorkspaceError(f"workspace file not found: {path}; run `urbanlens ingest` first")
    try:
        with gzip.open(path, "rt", encoding="utf-8") as fh:
            d = json.load(fh)
    except (OSError, EOFError, json.JSONDecodeError) as exc:
        raise WorkspaceError(f"workspace file corrupt: {path}: {exc}") from exc
    return workspace_from_dict(d)
