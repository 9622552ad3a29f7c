"""Pipeline stages over the workspace: ingest -> build -> synth-trips -> train
-> analyze, plus CSV export. Each stage validates its prerequisites and the
CLI persists the workspace after each one."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from . import analytics
from .boosting import GBTParams
from .config import period_weight_tuple, weekday_weight_tuple
from .errors import IngestError, StageMissingError
from .features import CensusTract, SOCIO_FIELDS, WeatherStation, aggregate_all
from .geo import GeoPoint, project_xy
from .hotspots import build_activity_series, detect_hotspots
from .ingest import (
    CRIME_SCHEMA,
    TRANSPORT_SCHEMA,
    load_census_geojson,
    load_points_csv,
    load_polygons_geojson,
    load_streets_geojson,
    load_trips_csv,
    load_weather,
)
from .prediction import (
    build_trip_matrix,
    g_mean,
    prediction_grid,
    split_indices,
    train,
    undersample,
)
from .streets import build_graph, classify_nodes, nearest_corner
from .trips import PERIODS, WEEKDAYS, TripTable, synth_trips
from .workspace import Workspace


def run_ingest(config: dict) -> Workspace:
    """Load every configured layer file into a fresh workspace."""
    data = config["data"]
    required = ("streets", "crime", "transport", "favelas", "tracts",
                "weather_series", "weather_stations")
    missing = [k for k in required if not data.get(k)]
    if missing:
        raise IngestError(f"config.data missing path(s): {', '.join(missing)}")

    w = Workspace(config=config)
    w.streets, street_warnings = load_streets_geojson(data["streets"])
    w.warnings.extend(street_warnings)
    w.crime = load_points_csv(data["crime"], CRIME_SCHEMA)
    w.transport = load_points_csv(data["transport"], TRANSPORT_SCHEMA)
    w.favelas = load_polygons_geojson(data["favelas"])
    w.tracts_raw = load_census_geojson(data["tracts"])
    w.stations_raw = load_weather(data["weather_series"], data["weather_stations"])
    if len(w.stations_raw) != 3:
        raise IngestError(f"expected exactly 3 weather stations, got {len(w.stations_raw)}")
    if data.get("trips"):
        w.trips_csv = load_trips_csv(data["trips"])
    for ds in (w.crime, w.transport):
        w.warnings.extend(ds.warnings)
    w.mark_stage("ingest")
    return w


def _resolve_origin(w: Workspace) -> GeoPoint:
    override = w.config.get("projection_origin")
    if override:
        return GeoPoint(float(override["lat"]), float(override["lon"]))
    verts = [v for line in w.streets for v in line]
    lat = sum(v[0] for v in verts) / len(verts)
    lon = sum(v[1] for v in verts) / len(verts)
    return GeoPoint(lat, lon)


def run_build(w: Workspace) -> Workspace:
    """Build the street graph, classify corners, assign crimes, detect hotspots."""
    w.require_stage("ingest")
    w.origin = _resolve_origin(w)
    w.graph = build_graph(w.streets, origin=w.origin,
                          snap_tolerance=float(w.config["snap_tolerance_m"]))
    w.classes = classify_nodes(w.graph, float(w.config["radii"]["near_dead_end_m"]))

    w.crime_nodes = [
        nearest_corner(w.graph, GeoPoint(lat, lon))
        for lat, lon in zip(w.crime.lats, w.crime.lons)
    ]
    year = int(w.config["analysis_year"])
    in_year = [
        (node, ts.month)
        for node, ts in zip(w.crime_nodes, w.crime.timestamps)
        if ts is not None and ts.year == year
    ]
    series = build_activity_series(
        w.graph.node_count,
        [node for node, _ in in_year],
        [month for _, month in in_year],
    )
    hs_cfg = w.config["hotspots"]
    w.hotspots = detect_hotspots(series, theta=float(hs_cfg["theta"]),
                                 min_count=int(hs_cfg["min_count"]))

    if w.trips_csv is not None:
        w.trips = _trips_from_csv(w)
    w.mark_stage("build")
    return w


def _trips_from_csv(w: Workspace) -> TripTable:
    t = w.trips_csv
    origin_nodes = [
        nearest_corner(w.graph, GeoPoint(lat, lon))
        for lat, lon in zip(t.origin_lats, t.origin_lons)
    ]
    dest_nodes = [
        nearest_corner(w.graph, GeoPoint(lat, lon))
        for lat, lon in zip(t.dest_lats, t.dest_lons)
    ]
    return TripTable(
        origin_nodes=np.asarray(origin_nodes, dtype=np.int64),
        dest_nodes=np.asarray(dest_nodes, dtype=np.int64),
        periods=np.asarray([PERIODS.index(p) for p in t.periods], dtype=np.int8),
        weekdays=np.asarray([WEEKDAYS.index(d) for d in t.weekdays], dtype=np.int8),
        months=np.asarray(t.months, dtype=np.int8),
        labels=np.asarray([1 if v == "occurrence" else 0 for v in t.labels], dtype=np.int8),
    )


def prepared_tracts(w: Workspace) -> list[CensusTract]:
    tracts = []
    for rec in w.tracts_raw:
        rings = [
            [project_xy(lat, lon, w.origin) for lat, lon in ring]
            for ring in rec.rings
        ]
        tracts.append(
            CensusTract(
                rings=rings,
                values=tuple(float(rec.properties[f]) for f in SOCIO_FIELDS),
                population=float(rec.properties["population"]),
            )
        )
    return tracts


def prepared_facilities(w: Workspace) -> list[tuple[float, float, str]]:
    return [
        (*project_xy(lat, lon, w.origin), cat)
        for lat, lon, cat in zip(w.transport.lats, w.transport.lons, w.transport.categories)
    ]


def prepared_favelas(w: Workspace) -> list[list[list[tuple[float, float]]]]:
    return [
        [[project_xy(lat, lon, w.origin) for lat, lon in ring] for ring in rec.rings]
        for rec in w.favelas
    ]


def prepared_stations(w: Workspace) -> list[WeatherStation]:
    out = []
    for s in w.stations_raw:
        x, y = project_xy(s.lat, s.lon, w.origin)
        out.append(WeatherStation(station_id=s.station_id, x=x, y=y, series=s.series))
    return out


def analysis_months(w: Workspace) -> list[str]:
    year = int(w.config["analysis_year"])
    return [f"{year}-{m:02d}" for m in range(1, 13)]


def run_synth_trips(w: Workspace) -> Workspace:
    """Generate the synthetic trip table from tract populations and hotspots."""
    w.require_stage("build")
    cfg = w.config["trips"]
    w.trips = synth_trips(
        w.graph,
        prepared_tracts(w),
        w.hotspots,
        n=int(cfg["n"]),
        seed=int(cfg["seed"]),
        ratio_denominator=int(cfg["ratio_denominator"]),
        hotspot_radius_m=float(w.config["radii"]["hotspot_label_m"]),
        period_weights=period_weight_tuple(w.config),
        weekday_weights=weekday_weight_tuple(w.config),
    )
    if w.trips.warning:
        w.warnings.append(w.trips.warning)
    w.mark_stage("synth_trips")
    return w


def compute_features(w: Workspace) -> np.ndarray:
    table = aggregate_all(
        w.graph,
        w.classes,
        crime_nodes=w.crime_nodes,
        crime_types=list(w.crime.categories),
        facilities=prepared_facilities(w),
        favela_polygons=prepared_favelas(w),
        tracts=prepared_tracts(w),
        stations=prepared_stations(w),
        months=analysis_months(w),
        hotspots=w.hotspots,
        trip_origin_nodes=list(w.trips.origin_nodes),
        trip_dest_nodes=list(w.trips.dest_nodes),
        transport_radius_m=float(w.config["radii"]["transport_m"]),
        favela_radius_m=float(w.config["radii"]["favela_m"]),
        census_epsilon_m=float(w.config["census_epsilon_m"]),
    )
    return table.values


def run_train(w: Workspace) -> Workspace:
    """Aggregate features, rebalance, fit the classifier, evaluate held-out."""
    if w.trips is None:
        raise StageMissingError("synth_trips", "synth-trips")
    w.require_stage("build")

    w.features = compute_features(w)
    from .features import FeatureTable

    X, y = build_trip_matrix(FeatureTable(w.features), w.trips)
    mcfg = w.config["model"]
    train_idx, test_idx = split_indices(len(y), float(mcfg["test_fraction"]),
                                        int(mcfg["split_seed"]))
    Xb, yb = undersample(X[train_idx], y[train_idx], seed=int(mcfg["undersample_seed"]))
    params = GBTParams(
        rounds=int(mcfg["rounds"]),
        depth=int(mcfg["depth"]),
        learning_rate=float(mcfg["learning_rate"]),
        reg_lambda=float(mcfg["reg_lambda"]),
        min_samples_leaf=int(mcfg["min_samples_leaf"]),
        seed=int(mcfg["seed"]),
    )
    w.model = train(Xb, yb.astype(np.float64), params)

    heldout_preds = w.model.predict(X[test_idx])
    score = g_mean(heldout_preds, y[test_idx])
    w.grid = prediction_grid(
        w.model,
        X[test_idx],
        y[test_idx],
        w.trips.origin_nodes[test_idx],
        w.trips.dest_nodes[test_idx],
        w.graph,
        cell_m=float(w.config["grid"]["cell_m"]),
    )
    w.evaluation = {
        "g_mean": score,
        "heldout_trips": int(len(test_idx)),
        "train_trips": int(len(train_idx)),
        "balanced_train_size": int(len(yb)),
        "heldout_occurrences": int(y[test_idx].sum()),
    }
    w.mark_stage("train")
    return w


def run_analyze(w: Workspace) -> Workspace:
    """Correlation matrix and Shapley attribution reports."""
    w.require_stage("train")
    from .features import FeatureTable

    X, _ = build_trip_matrix(FeatureTable(w.features), w.trips)
    w.correlation = analytics.correlation_report(X)

    a_cfg = w.config["analytics"]
    rng = np.random.default_rng(int(a_cfg["shapley_seed"]))
    n_sample = min(int(a_cfg["shapley_samples"]), X.shape[0])
    sample = X[rng.choice(X.shape[0], size=n_sample, replace=False)]
    background = X.mean(axis=0)
    w.shapley = analytics.shapley_report(
        w.model.predict_margin,
        sample,
        background,
        analytics.trip_feature_names(),
        analytics.trip_layer_assignment(),
        method="monte_carlo",
        permutations=int(a_cfg["shapley_permutations"]),
        seed=int(a_cfg["shapley_seed"]),
    )
    w.mark_stage("analyze")
    return w


def run_export(w: Workspace, out_dir: str | Path) -> list[Path]:
    """Write the grid and analytics reports as CSV files."""
    w.require_stage("train")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    grid_path = out / "prediction_grid.csv"
    with grid_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cell_ix", "cell_iy", "success", "failure"])
        for ix in range(w.grid.nx):
            for iy in range(w.grid.ny):
                writer.writerow([ix, iy, int(w.grid.success[ix, iy]), int(w.grid.failure[ix, iy])])
    written.append(grid_path)

    if w.correlation is not None:
        full_path = out / "correlation_full.csv"
        with full_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature"] + w.correlation.feature_names)
            for name, row in zip(w.correlation.feature_names, w.correlation.full):
                writer.writerow([name] + [f"{v:.10g}" for v in row])
        written.append(full_path)

        reduced_path = out / "correlation_reduced.csv"
        with reduced_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["layer"] + list(w.correlation.layers))
            for name, row in zip(w.correlation.layers, w.correlation.reduced):
                writer.writerow([name] + [f"{v:.10g}" for v in row])
        written.append(reduced_path)

    if w.shapley is not None:
        shap_path = out / "shapley.csv"
        with shap_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "layer", "mean_abs_shapley", "percentage"])
            for name, layer, value, pct in zip(
                w.shapley.feature_names, w.shapley.assignment,
                w.shapley.mean_abs, w.shapley.percentages,
            ):
                writer.writerow([name, layer, f"{value:.10g}", f"{pct:.10g}"])
        written.append(shap_path)
    return written
