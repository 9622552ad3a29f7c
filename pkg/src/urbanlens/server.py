"""Stateless HTTP/JSON API over an immutable workspace snapshot.

No request mutates anything: every response is a pure function of the loaded
workspace and the request parameters, so any request permutation yields
identical answers. Per-layer lens indexes are built once and cached.
"""

from __future__ import annotations

import json
from functools import lru_cache

from fastapi import FastAPI, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__, temporal
from .errors import (
    BadParameterError,
    StageMissingError,
    UnsupportedLayerError,
    UrbanLensError,
)
from .geo import GeoPoint
from .layers import (
    LAYER_ROSTER,
    features_payload,
    graph_nodes_payload,
    grid_cells_payload,
    layer_info,
    lens_index,
    parse_bbox,
    record_count,
)
from .quadtree import QuadTree
from .schemas import (
    CorrelationResponse,
    EvaluationResponse,
    FeaturesResponse,
    GridResponse,
    HealthResponse,
    HistogramResponse,
    LayerDescriptor,
    LensResponse,
    NodesResponse,
    ShapleyResponse,
    WindowRequest,
    WindowResponse,
    WindowState,
)
from .temporal import TemporalHistogram, histogram_from_counts, make_histogram
from .trips import WEEKDAYS
from .workspace import Workspace


def _histogram_for(w: Workspace, layer_id: int, granularity: str) -> TemporalHistogram:
    info = layer_info(layer_id)
    if granularity not in temporal.GRANULARITY_BINS:
        raise BadParameterError(f"unknown granularity: {granularity!r}", parameter="granularity")
    if info.name == "crime":
        if not w.crime:
            raise StageMissingError("ingest", "ingest")
        stamps = [t for t in w.crime.timestamps if t is not None]
        return make_histogram(stamps, granularity)
    if info.name == "taxi_trips":
        if w.trips is None:
            raise StageMissingError("synth_trips", "synth-trips")
        if granularity == "month":
            counts = [0] * 12
            for m in w.trips.months:
                counts[int(m) - 1] += 1
            return histogram_from_counts(counts, "month")
        if granularity == "weekday":
            counts = [0] * len(WEEKDAYS)
            for d in w.trips.weekdays:
                counts[int(d)] += 1
            return histogram_from_counts(counts, "weekday")
        raise UnsupportedLayerError(
            "trips carry period-of-day attributes, not hour timestamps",
            parameter="granularity",
        )
    raise UnsupportedLayerError(
        f"layer {info.name!r} has no event timestamps", parameter="layer"
    )


def create_app(w: Workspace) -> FastAPI:
    app = FastAPI(title="urbanlens", version=__version__)
    cors = w.config.get("server", {}).get("cors_origins", ["*"])
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    index_cache: dict[int, QuadTree] = {}

    def layer_lens_index(layer_id: int) -> QuadTree:
        if layer_id not in index_cache:
            index_cache[layer_id] = lens_index(w, layer_id)
        return index_cache[layer_id]

    @app.exception_handler(UrbanLensError)
    async def handle_engine_error(request: Request, exc: UrbanLensError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"code": exc.code, "message": exc.message, "parameter": exc.parameter},
        )

    @app.get("/api/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.get("/api/layers", response_model=list[LayerDescriptor])
    def layers():
        return [
            LayerDescriptor(
                id=info.layer_id,
                name=info.name,
                kind=info.kind,
                record_count=record_count(w, info.layer_id),
                toggle_key=info.toggle_key,
                icon=info.icon,
            )
            for info in LAYER_ROSTER
        ]

    @lru_cache(maxsize=64)
    def _features_bytes(layer_id: int, bbox: str | None) -> bytes:
        # pure memo over the immutable workspace: identical bytes every call
        records = features_payload(w, layer_id, parse_bbox(bbox))
        return json.dumps(
            {"layer": layer_id, "count": len(records), "records": records},
            separators=(",", ":"),
        ).encode()

    @app.get("/api/layers/{layer_id}/features", response_model=FeaturesResponse)
    def layer_features(layer_id: int, bbox: str | None = Query(default=None)):
        layer_info(layer_id)  # 404 on unknown id
        parse_bbox(bbox)  # parameter errors surface before the cache
        return Response(content=_features_bytes(layer_id, bbox), media_type="application/json")

    @app.get("/api/lens/spatial", response_model=LensResponse)
    def spatial_lens(
        layer: int,
        lon: float,
        lat: float,
        k: int = Query(default=100, ge=0),
    ):
        if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
            raise BadParameterError("cursor out of coordinate range", parameter="lat")
        index = layer_lens_index(layer)
        result = index.lens(GeoPoint(lat, lon), k)
        return LensResponse(layer=layer, k=k, radius_m=result.radius, members=result.members)

    @app.get("/api/temporal/{layer_id}/histogram", response_model=HistogramResponse)
    def temporal_histogram(layer_id: int, granularity: str = Query(default="month")):
        h = _histogram_for(w, layer_id, granularity)
        return HistogramResponse(
            layer=layer_id,
            granularity=granularity,
            counts=list(h.counts),
            cumulative=list(h.cumulative),
            total=h.total,
        )

    @app.post("/api/temporal/window", response_model=WindowResponse)
    def temporal_window(req: WindowRequest):
        h = _histogram_for(w, req.layer, req.granularity)
        try:
            target = temporal.resolve_target(h, req.mode, req.value)
        except ValueError as exc:
            raise BadParameterError(str(exc), parameter="value")
        if req.window is None:
            window = temporal.initial_window(h, target)
        else:
            current = temporal.TemporalWindow(
                lo=req.window.lo,
                hi=req.window.hi,
                direction=temporal.Direction(req.window.direction),
                target=target,
            )
            try:
                window = temporal.step(h, current)
            except ValueError as exc:
                raise BadParameterError(str(exc), parameter="window")
        return WindowResponse(
            layer=req.layer,
            granularity=req.granularity,
            window=WindowState(
                lo=window.lo, hi=window.hi,
                direction=window.direction.value, target=window.target,
            ),
            count=h.window_count(window.lo, window.hi),
            total=h.total,
        )

    @app.get("/api/prediction/grid", response_model=GridResponse)
    def prediction_grid_endpoint():
        if w.grid is None:
            raise StageMissingError("train", "train")
        return GridResponse(
            cell_m=w.grid.cell_m,
            nx=w.grid.nx,
            ny=w.grid.ny,
            total_success=int(w.grid.success.sum()),
            total_failure=int(w.grid.failure.sum()),
            cells=grid_cells_payload(w),
        )

    @app.get("/api/prediction/evaluation", response_model=EvaluationResponse)
    def prediction_evaluation():
        if w.evaluation is None:
            raise StageMissingError("train", "train")
        return EvaluationResponse(**w.evaluation)

    @app.get("/api/analytics/correlation", response_model=CorrelationResponse)
    def analytics_correlation():
        if w.correlation is None:
            raise StageMissingError("analyze", "analyze")
        r = w.correlation
        return CorrelationResponse(
            layers=list(r.layers),
            reduced=r.reduced.tolist(),
            feature_names=r.feature_names,
            full=r.full.tolist(),
            zero_variance=r.zero_variance,
            singleton_layers=r.singleton_layers,
        )

    @app.get("/api/analytics/shapley", response_model=ShapleyResponse)
    def analytics_shapley():
        if w.shapley is None:
            raise StageMissingError("analyze", "analyze")
        r = w.shapley
        grand = float(sum(r.layer_totals.values()))
        layer_pct = {
            k: (v / grand * 100.0 if grand > 0 else 0.0) for k, v in r.layer_totals.items()
        }
        return ShapleyResponse(
            feature_names=r.feature_names,
            assignment=r.assignment,
            mean_abs=r.mean_abs.tolist(),
            percentages=r.percentages.tolist(),
            layer_totals=r.layer_totals,
            layer_percentages=layer_pct,
            sample_size=r.sample_size,
            method=r.method,
        )

    @app.get("/api/graph/nodes", response_model=NodesResponse)
    def graph_nodes(bbox: str | None = Query(default=None)):
        if w.graph is None:
            raise StageMissingError("build", "build")
        nodes = graph_nodes_payload(w, parse_bbox(bbox))
        return NodesResponse(count=len(nodes), nodes=nodes)

    return app
