import numpy as np
import pytest

from urbanlens import pipeline
from urbanlens.config import load_config
from urbanlens.geo import GeoPoint, ProjectedPoint, unproject
from urbanlens.samplecity import generate_sample_city
from urbanlens.streets import build_graph

CITY_ORIGIN = GeoPoint(-23.55, -46.63)


@pytest.fixture(scope="session")
def desk_city_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("desk_city")
    generate_sample_city(out, preset="desk")
    return out


@pytest.fixture(scope="session")
def desk_workspace(desk_city_dir):
    """Full pipeline on the desk-scale synthetic city, run once per session."""
    cfg = load_config(desk_city_dir / "config.yaml")
    w = pipeline.run_ingest(cfg)
    pipeline.run_build(w)
    pipeline.run_synth_trips(w)
    pipeline.run_train(w)
    pipeline.run_analyze(w)
    return w


@pytest.fixture(scope="session")
def mini_built_workspace(tmp_path_factory):
    """Mini city stopped after `build`: later stages are intentionally missing."""
    out = tmp_path_factory.mktemp("mini_city")
    generate_sample_city(out, preset="mini")
    cfg = load_config(out / "config.yaml")
    w = pipeline.run_ingest(cfg)
    pipeline.run_build(w)
    return w


def grid_streets(nx: int, ny: int, spacing: float, origin: GeoPoint = CITY_ORIGIN):
    """Polylines (lat, lon) for an nx-by-ny street grid with the given spacing in meters."""

    def geo(x, y):
        p = unproject(ProjectedPoint(x, y), origin)
        return (p.lat, p.lon)

    streets = []
    for j in range(ny):
        streets.append([geo(i * spacing, j * spacing) for i in range(nx)])
    for i in range(nx):
        streets.append([geo(i * spacing, j * spacing) for j in range(ny)])
    return streets


@pytest.fixture(scope="session")
def grid_graph():
    """20x20 street grid, 200 m spacing, built once per session."""
    g = build_graph(grid_streets(20, 20, 200.0), origin=CITY_ORIGIN)
    assert g.node_count == 400
    return g


def random_geopoints(n: int, seed: int, origin: GeoPoint = CITY_ORIGIN, extent_m: float = 5000.0):
    """n seeded uniform points within a square extent around the origin."""
    rng = np.random.default_rng(seed)
    xy = rng.uniform(-extent_m, extent_m, size=(n, 2))
    pts = []
    for i, (x, y) in enumerate(xy):
        p = unproject(ProjectedPoint(float(x), float(y)), origin)
        pts.append((GeoPoint(p.lat, p.lon), i))
    return pts
