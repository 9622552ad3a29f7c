"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class ApiErrorModel(BaseModel):
    code: str
    message: str
    parameter: str | None = None


class LayerDescriptor(BaseModel):
    id: int
    name: str
    kind: str
    record_count: int
    toggle_key: str
    icon: str


class FeaturesResponse(BaseModel):
    layer: int
    count: int
    records: list[dict]


class LensResponse(BaseModel):
    layer: int
    k: int
    radius_m: float
    members: list[int]


class HistogramResponse(BaseModel):
    layer: int
    granularity: str
    counts: list[int]
    cumulative: list[int]
    total: int


class WindowState(BaseModel):
    lo: int
    hi: int
    direction: str
    target: int


class WindowRequest(BaseModel):
    layer: int
    granularity: str
    mode: str = Field(description="count or density")
    value: float
    window: WindowState | None = None


class WindowResponse(BaseModel):
    layer: int
    granularity: str
    window: WindowState
    count: int
    total: int


class GridCellBounds(BaseModel):
    min_lat: float
    min_lon: float
    max_lat: float
    max_lon: float


class GridCell(BaseModel):
    ix: int
    iy: int
    success: int
    failure: int
    bounds: GridCellBounds


class GridResponse(BaseModel):
    cell_m: float
    nx: int
    ny: int
    total_success: int
    total_failure: int
    cells: list[GridCell]


class CorrelationResponse(BaseModel):
    layers: list[str]
    reduced: list[list[float]]
    feature_names: list[str]
    full: list[list[float]]
    zero_variance: list[int]
    singleton_layers: list[str]


class ShapleyResponse(BaseModel):
    feature_names: list[str]
    assignment: list[str]
    mean_abs: list[float]
    percentages: list[float]
    layer_totals: dict[str, float]
    layer_percentages: dict[str, float]
    sample_size: int
    method: str


class GraphNode(BaseModel):
    id: int
    lat: float
    lon: float
    node_class: str
    degree: int


class NodesResponse(BaseModel):
    count: int
    nodes: list[GraphNode]


class EvaluationResponse(BaseModel):
    g_mean: float
    heldout_trips: int
    train_trips: int
    balanced_train_size: int
    heldout_occurrences: int
