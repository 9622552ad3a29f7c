"""Loaders for the documented file formats, with located validation errors.

CSV point layers, GeoJSON polygon/street layers, the trips CSV, and the
weather station series. Every malformed row or feature is reported with its
location; more than 1 % bad rows aborts the load so data loss is never silent.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from .errors import IngestError
from .features import CRIME_TYPES, SOCIO_FIELDS, TRANSPORT_CATEGORIES
from .trips import PERIODS, WEEKDAYS

BAD_ROW_ABORT_FRACTION = 0.01
_MONTH_KEY = re.compile(r"^\d{4}-(0[1-9]|1[0-2])$")


@dataclass
class PointSchema:
    """Column layout of a CSV point layer."""

    lat: str = "lat"
    lon: str = "lon"
    timestamp: str | None = None
    category: str | None = None
    allowed_categories: tuple[str, ...] | None = None


CRIME_SCHEMA = PointSchema(
    lat="lat", lon="lon", timestamp="timestamp",
    category="crime_type", allowed_categories=CRIME_TYPES,
)
TRANSPORT_SCHEMA = PointSchema(
    lat="lat", lon="lon", category="category",
    allowed_categories=TRANSPORT_CATEGORIES,
)


@dataclass
class PointDataset:
    lats: list[float] = field(default_factory=list)
    lons: list[float] = field(default_factory=list)
    timestamps: list[datetime | None] = field(default_factory=list)
    categories: list[str | None] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.lats)


@dataclass
class PolygonRecord:
    """One feature; multipolygon parts become multiple rings under one record."""

    rings: list[list[tuple[float, float]]]  # (lat, lon) vertices, no closing dup
    properties: dict


def _check_header(reader: csv.DictReader, required: list[str], path: Path) -> None:
    missing = [c for c in required if c not in (reader.fieldnames or [])]
    if missing:
        raise IngestError(f"{path.name}: missing column(s): {', '.join(missing)}")


def _finish(errors: list[str], n_rows: int, path: Path, warnings: list[str]) -> None:
    if errors:
        if n_rows == 0 or len(errors) / n_rows > BAD_ROW_ABORT_FRACTION:
            shown = "; ".join(errors[:5])
            raise IngestError(
                f"{path.name}: {len(errors)} of {n_rows} rows invalid (aborting): {shown}"
            )
        warnings.extend(f"{path.name}: skipped {e}" for e in errors)


def load_points_csv(path: str | Path, schema: PointSchema) -> PointDataset:
    """Parse a point CSV; invalid rows are rejected with their row numbers."""
    path = Path(path)
    ds = PointDataset()
    errors: list[str] = []
    n_rows = 0
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        required = [schema.lat, schema.lon]
        if schema.timestamp:
            required.append(schema.timestamp)
        if schema.category:
            required.append(schema.category)
        _check_header(reader, required, path)
        for line_no, row in enumerate(reader, start=2):
            n_rows += 1
            try:
                lat = float(row[schema.lat])
                lon = float(row[schema.lon])
            except (TypeError, ValueError):
                errors.append(f"row {line_no}: unparseable coordinates")
                continue
            if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
                errors.append(f"row {line_no}: coordinate out of range ({lat}, {lon})")
                continue
            ts = None
            if schema.timestamp:
                try:
                    ts = datetime.fromisoformat(row[schema.timestamp])
                except (TypeError, ValueError):
                    errors.append(f"row {line_no}: unparseable timestamp {row[schema.timestamp]!r}")
                    continue
            cat = None
            if schema.category:
                cat = (row[schema.category] or "").strip()
                if schema.allowed_categories and cat not in schema.allowed_categories:
                    errors.append(f"row {line_no}: category {cat!r} not in {schema.allowed_categories}")
                    continue
            ds.lats.append(lat)
            ds.lons.append(lon)
            ds.timestamps.append(ts)
            ds.categories.append(cat)
    if n_rows == 0:
        ds.warnings.append(f"{path.name}: no data rows")
    _finish(errors, n_rows, path, ds.warnings)
    return ds


def _validate_ring(coords, feature_idx: int, path: Path) -> list[tuple[float, float]]:
    if len(coords) < 4:
        raise IngestError(f"{path.name}: feature {feature_idx}: ring has fewer than 3 distinct vertices")
    if coords[0] != coords[-1]:
        raise IngestError(f"{path.name}: feature {feature_idx}: unclosed ring")
    ring = [(float(lat), float(lon)) for lon, lat in coords[:-1]]
    if len({(round(a, 12), round(b, 12)) for a, b in ring}) < 3:
        raise IngestError(f"{path.name}: feature {feature_idx}: ring has fewer than 3 distinct vertices")
    return ring


def load_polygons_geojson(
    path: str | Path, required_properties: tuple[str, ...] = ()
) -> list[PolygonRecord]:
    """Load Polygon/MultiPolygon features; exterior rings only."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise IngestError(f"{path.name}: invalid JSON: {exc}") from exc
    features = doc.get("features", [])
    records: list[PolygonRecord] = []
    for idx, feature in enumerate(features):
        geom = feature.get("geometry") or {}
        gtype = geom.get("type")
        if gtype not in ("Polygon", "MultiPolygon"):
            continue
        props = feature.get("properties") or {}
        for prop in required_properties:
            if prop not in props:
                raise IngestError(f"{path.name}: feature {idx}: missing property {prop!r}")
        polys = [geom["coordinates"]] if gtype == "Polygon" else geom["coordinates"]
        rings = [_validate_ring(poly[0], idx, path) for poly in polys]
        records.append(PolygonRecord(rings=rings, properties=props))
    return records


def load_census_geojson(path: str | Path) -> list[PolygonRecord]:
    """Census tract polygons; population and all 7 indicators are mandatory."""
    return load_polygons_geojson(path, required_properties=("population",) + SOCIO_FIELDS)


def load_streets_geojson(path: str | Path) -> tuple[list[list[tuple[float, float]]], list[str]]:
    """LineString features as (lat, lon) polylines; degenerate lines are dropped."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise IngestError(f"{path.name}: invalid JSON: {exc}") from exc
    polylines: list[list[tuple[float, float]]] = []
    warnings: list[str] = []
    for idx, feature in enumerate(doc.get("features", [])):
        geom = feature.get("geometry") or {}
        gtype = geom.get("type")
        if gtype == "LineString":
            lines = [geom["coordinates"]]
        elif gtype == "MultiLineString":
            lines = geom["coordinates"]
        else:
            continue
        for coords in lines:
            if len(coords) < 2:
                warnings.append(f"{path.name}: feature {idx}: dropped single-vertex line")
                continue
            polylines.append([(float(lat), float(lon)) for lon, lat in coords])
    if not polylines:
        raise IngestError(f"{path.name}: no linestring features")
    return polylines, warnings


TRIPS_COLUMNS = (
    "origin_lat", "origin_lon", "dest_lat", "dest_lon",
    "period", "weekday", "month", "label",
)


@dataclass
class TripsCsv:
    origin_lats: list[float] = field(default_factory=list)
    origin_lons: list[float] = field(default_factory=list)
    dest_lats: list[float] = field(default_factory=list)
    dest_lons: list[float] = field(default_factory=list)
    periods: list[str] = field(default_factory=list)
    weekdays: list[str] = field(default_factory=list)
    months: list[int] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.labels)


def load_trips_csv(path: str | Path) -> TripsCsv:
    path = Path(path)
    out = TripsCsv()
    errors: list[str] = []
    n_rows = 0
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader, list(TRIPS_COLUMNS), path)
        for line_no, row in enumerate(reader, start=2):
            n_rows += 1
            try:
                olat, olon = float(row["origin_lat"]), float(row["origin_lon"])
                dlat, dlon = float(row["dest_lat"]), float(row["dest_lon"])
                month = int(row["month"])
            except (TypeError, ValueError):
                errors.append(f"row {line_no}: unparseable numeric field")
                continue
            if not all(-90 <= v <= 90 for v in (olat, dlat)) or not all(
                -180 <= v <= 180 for v in (olon, dlon)
            ):
                errors.append(f"row {line_no}: coordinate out of range")
                continue
            if row["period"] not in PERIODS:
                errors.append(f"row {line_no}: unknown period {row['period']!r}")
                continue
            if row["weekday"] not in WEEKDAYS:
                errors.append(f"row {line_no}: unknown weekday {row['weekday']!r}")
                continue
            if not 1 <= month <= 12:
                errors.append(f"row {line_no}: month out of range")
                continue
            if row["label"] not in ("regular", "occurrence"):
                errors.append(f"row {line_no}: unknown label {row['label']!r}")
                continue
            out.origin_lats.append(olat)
            out.origin_lons.append(olon)
            out.dest_lats.append(dlat)
            out.dest_lons.append(dlon)
            out.periods.append(row["period"])
            out.weekdays.append(row["weekday"])
            out.months.append(month)
            out.labels.append(row["label"])
    _finish(errors, n_rows, path, out.warnings)
    return out


@dataclass
class StationRecord:
    station_id: str
    lat: float
    lon: float
    series: dict[str, tuple[float, float, float]] = field(default_factory=dict)


def load_weather(series_path: str | Path, stations_path: str | Path) -> list[StationRecord]:
    """Stations CSV (station_id, lat, lon) joined with the monthly series CSV
    (station_id, date YYYY-MM, tmax_c, tmin_c, precip_mm)."""
    stations_path = Path(stations_path)
    series_path = Path(series_path)
    stations: dict[str, StationRecord] = {}
    with stations_path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader, ["station_id", "lat", "lon"], stations_path)
        for line_no, row in enumerate(reader, start=2):
            try:
                rec = StationRecord(row["station_id"].strip(), float(row["lat"]), float(row["lon"]))
            except (TypeError, ValueError):
                raise IngestError(f"{stations_path.name}: row {line_no}: bad station record")
            stations[rec.station_id] = rec
    if not stations:
        raise IngestError(f"{stations_path.name}: no stations")

    with series_path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader, ["station_id", "date", "tmax_c", "tmin_c", "precip_mm"], series_path)
        for line_no, row in enumerate(reader, start=2):
            sid = row["station_id"].strip()
            if sid not in stations:
                raise IngestError(f"{series_path.name}: row {line_no}: unknown station {sid!r}")
            date = row["date"].strip()
            if not _MONTH_KEY.match(date):
                raise IngestError(f"{series_path.name}: row {line_no}: bad month key {date!r}")
            try:
                values = (float(row["tmax_c"]), float(row["tmin_c"]), float(row["precip_mm"]))
            except (TypeError, ValueError):
                raise IngestError(f"{series_path.name}: row {line_no}: unparseable values")
            stations[sid].series[date] = values
    return sorted(stations.values(), key=lambda s: s.station_id)
