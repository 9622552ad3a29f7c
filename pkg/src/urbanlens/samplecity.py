"""Deterministic synthetic city: input files for the full pipeline.

Writes the street grid, clustered crime points, transport facilities,
settlement polygons, census tracts, weather series, and a ready-to-run config.
Crime concentrates around a few cluster centers so hotspot detection and the
trip classifier have a real signal to find.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np
import yaml

from .geo import GeoPoint, ProjectedPoint, unproject

CITY_CENTER = GeoPoint(-23.55, -46.63)

PRESETS = {
    # ~2000-node grid, desk-scale pipeline. Tract cells (~920 m) are wider
    # than the 500 m hotspot-labeling radius plus the cluster spread, so only
    # the tracts hosting crime clusters produce near-hotspot trip endpoints.
    "desk": {
        "grid_nx": 44,
        "grid_ny": 44,
        "spacing_m": 150.0,
        "stub_count": 40,
        "tracts_x": 7,
        "tracts_y": 7,
        "crime_clusters": 5,
        "crimes_per_cluster": 180,
        "cluster_sigma_m": 90.0,
        "background_crimes": 500,
        "transport_count": 260,
        "favela_count": 4,
        "trips_n": 20_000,
    },
    # small and fast, for tests that only need plumbing
    "mini": {
        "grid_nx": 12,
        "grid_ny": 12,
        "spacing_m": 200.0,
        "stub_count": 6,
        "tracts_x": 4,
        "tracts_y": 4,
        "crime_clusters": 2,
        "crimes_per_cluster": 120,
        "cluster_sigma_m": 80.0,
        "background_crimes": 120,
        "transport_count": 60,
        "favela_count": 2,
        "trips_n": 4_000,
    },
}


def _geo(x: float, y: float, origin: GeoPoint) -> tuple[float, float]:
    p = unproject(ProjectedPoint(x, y), origin)
    return p.lat, p.lon


def _linestring(points_xy, origin):
    coords = []
    for x, y in points_xy:
        lat, lon = _geo(x, y, origin)
        coords.append([lon, lat])
    return {"type": "Feature", "properties": {}, "geometry": {"type": "LineString", "coordinates": coords}}


def _polygon_feature(ring_xy, properties, origin):
    coords = []
    for x, y in ring_xy:
        lat, lon = _geo(x, y, origin)
        coords.append([lon, lat])
    coords.append(coords[0])
    return {
        "type": "Feature",
        "properties": properties,
        "geometry": {"type": "Polygon", "coordinates": [coords]},
    }


def generate_sample_city(
    out_dir: str | Path,
    preset: str = "desk",
    seed: int = 99,
    origin: GeoPoint = CITY_CENTER,
) -> Path:
    """Write all input files plus config.yaml into ``out_dir``; returns the config path."""
    p = PRESETS[preset]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    nx, ny, spacing = p["grid_nx"], p["grid_ny"], p["spacing_m"]
    width, height = (nx - 1) * spacing, (ny - 1) * spacing

    # --- streets: full grid plus short dead-end stubs off the boundary
    features = []
    for j in range(ny):
        features.append(_linestring([(i * spacing, j * spacing) for i in range(nx)], origin))
    for i in range(nx):
        features.append(_linestring([(i * spacing, j * spacing) for j in range(ny)], origin))
    for _ in range(p["stub_count"]):
        side = int(rng.integers(0, 4))
        if side in (0, 1):  # west/east stubs
            j = int(rng.integers(0, ny))
            x0 = 0.0 if side == 0 else width
            direction = -1.0 if side == 0 else 1.0
            stub = [(x0, j * spacing), (x0 + direction * float(rng.uniform(40, 80)), j * spacing)]
        else:  # south/north stubs
            i = int(rng.integers(0, nx))
            y0 = 0.0 if side == 2 else height
            direction = -1.0 if side == 2 else 1.0
            stub = [(i * spacing, y0), (i * spacing, y0 + direction * float(rng.uniform(40, 80)))]
        features.append(_linestring(stub, origin))
    (out / "streets.geojson").write_text(
        json.dumps({"type": "FeatureCollection", "features": features})
    )

    # --- census tracts: rectangular partition with a center-to-edge income gradient
    tx, ty = p["tracts_x"], p["tracts_y"]
    tract_w, tract_h = width / tx, height / ty
    cx, cy = width / 2, height / 2
    tract_features = []
    tract_centers = []
    for j in range(ty):
        for i in range(tx):
            x0, y0 = i * tract_w, j * tract_h
            center = (x0 + tract_w / 2, y0 + tract_h / 2)
            tract_centers.append(center)
            centrality = 1.0 - math.hypot(center[0] - cx, center[1] - cy) / math.hypot(cx, cy)
            income = float(1200 + 6000 * centrality + rng.uniform(-300, 300))
            props = {
                "population": float(rng.integers(800, 12_000)),
                "income": round(income, 2),
                "householder_income": round(income * float(rng.uniform(0.55, 0.75)), 2),
                "unemployment": round(float(np.clip(0.22 - 0.15 * centrality + rng.uniform(-0.02, 0.02), 0.01, 0.4)), 4),
                "literacy_7_15": round(float(np.clip(0.80 + 0.15 * centrality + rng.uniform(-0.03, 0.03), 0.5, 1.0)), 4),
                "pct_under_18": round(float(rng.uniform(0.18, 0.32)), 4),
                "pct_18_65": round(float(rng.uniform(0.55, 0.68)), 4),
                "pct_over_65": round(float(rng.uniform(0.05, 0.18)), 4),
            }
            ring = [(x0, y0), (x0 + tract_w, y0), (x0 + tract_w, y0 + tract_h), (x0, y0 + tract_h)]
            tract_features.append(_polygon_feature(ring, props, origin))
    (out / "tracts.geojson").write_text(
        json.dumps({"type": "FeatureCollection", "features": tract_features})
    )

    # --- crime: clusters at a few tract centers (persistently active all year)
    # plus a sparse background that stays below the hotspot thresholds.
    # Hosts come from the low-population half so near-hotspot trips stay a
    # small minority of the total.
    populations = np.array([f["properties"]["population"] for f in tract_features])
    low_pop = np.argsort(populations, kind="stable")[: max(p["crime_clusters"], len(populations) // 2)]
    cluster_ids = rng.choice(low_pop, size=p["crime_clusters"], replace=False)
    crime_rows = []

    def crime_row(x, y, month):
        lat, lon = _geo(x, y, origin)
        day = int(rng.integers(1, 28))
        hour = int(rng.integers(0, 24))
        kind = "vehicle_theft" if rng.random() < 0.55 else "phone_theft"
        return [f"{lat:.7f}", f"{lon:.7f}", f"2020-{month:02d}-{day:02d} {hour:02d}:30:00", kind]

    sigma = p["cluster_sigma_m"]
    for cid in cluster_ids:
        cxy = tract_centers[int(cid)]
        for _ in range(p["crimes_per_cluster"]):
            x = float(cxy[0] + rng.normal(0, sigma))
            y = float(cxy[1] + rng.normal(0, sigma))
            month = int(rng.integers(1, 13))
            crime_rows.append(crime_row(x, y, month))
    for _ in range(p["background_crimes"]):
        x = float(rng.uniform(0, width))
        y = float(rng.uniform(0, height))
        month = int(rng.integers(1, 13))
        crime_rows.append(crime_row(x, y, month))
    with (out / "crime.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lat", "lon", "timestamp", "crime_type"])
        writer.writerows(crime_rows)

    # --- public transport: denser near the center
    categories = ["bus_stop"] * 70 + ["terminal"] * 6 + ["subway"] * 14 + ["train"] * 10
    with (out / "transport.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lat", "lon", "category"])
        for _ in range(p["transport_count"]):
            x = float(np.clip(rng.normal(cx, width / 3), 0, width))
            y = float(np.clip(rng.normal(cy, height / 3), 0, height))
            lat, lon = _geo(x, y, origin)
            cat = categories[int(rng.integers(0, len(categories)))]
            writer.writerow([f"{lat:.7f}", f"{lon:.7f}", cat])

    # --- favelas: peripheral polygons
    favela_features = []
    for k in range(p["favela_count"]):
        corner_x = 0.0 if k % 2 == 0 else width
        corner_y = 0.0 if k < 2 else height
        fx = float(corner_x + (1 if corner_x == 0 else -1) * rng.uniform(100, width / 4))
        fy = float(corner_y + (1 if corner_y == 0 else -1) * rng.uniform(100, height / 4))
        size = float(rng.uniform(200, 500))
        ring = [(fx, fy), (fx + size, fy), (fx + size, fy + size), (fx, fy + size)]
        favela_features.append(_polygon_feature(ring, {"name": f"settlement_{k}"}, origin))
    (out / "favelas.geojson").write_text(
        json.dumps({"type": "FeatureCollection", "features": favela_features})
    )

    # --- weather: three stations, seasonal monthly series
    station_xy = [("barueri_nw", -2000.0, height + 2000.0),
                  ("interlagos_s", cx, -2500.0),
                  ("mirante_c", cx + 1500.0, cy + 1500.0)]
    with (out / "weather_stations.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["station_id", "lat", "lon"])
        for sid, x, y in station_xy:
            lat, lon = _geo(x, y, origin)
            writer.writerow([sid, f"{lat:.7f}", f"{lon:.7f}"])
    with (out / "weather_series.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["station_id", "date", "tmax_c", "tmin_c", "precip_mm"])
        for s_idx, (sid, _, _) in enumerate(station_xy):
            for month in range(1, 13):
                # southern-hemisphere seasonality + per-station offset
                season = math.cos((month - 1.5) * math.pi / 6.0)
                tmax = 27.0 + 4.0 * season + s_idx * 0.7 + float(rng.uniform(-0.5, 0.5))
                tmin = 17.0 + 3.5 * season + s_idx * 0.5 + float(rng.uniform(-0.5, 0.5))
                precip = max(0.0, 160.0 * max(season, 0.1) + float(rng.uniform(-20, 20)))
                writer.writerow([sid, f"2020-{month:02d}", f"{tmax:.2f}", f"{tmin:.2f}", f"{precip:.1f}"])

    config = {
        "data": {
            "streets": "streets.geojson",
            "crime": "crime.csv",
            "transport": "transport.csv",
            "favelas": "favelas.geojson",
            "tracts": "tracts.geojson",
            "weather_series": "weather_series.csv",
            "weather_stations": "weather_stations.csv",
        },
        "analysis_year": 2020,
        "trips": {"n": p["trips_n"], "seed": 7},
        "analytics": {"shapley_samples": 200, "shapley_permutations": 5},
        "workspace": "workspace.json.gz",
    }
    config_path = out / "config.yaml"
    config_path.write_text(yaml.safe_dump(config, sort_keys=False))
    return config_path
