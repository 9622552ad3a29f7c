"""Acceptance suite: one test per release criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion lines.
Oracles here are kept independent of the library paths they check: brute-force
sorts, shapely geometry, subset enumeration, and hand-computed fixtures.
"""

import math
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient
from shapely.geometry import Point, Polygon

from urbanlens import temporal
from urbanlens.analytics import shapley_exact, shapley_monte_carlo, reduce_by_layer
from urbanlens.boosting import GBTParams, train_gbt
from urbanlens.features import (
    CensusTract,
    SOCIO_FIELDS,
    census_assign,
    favela_flag,
    idw_weather,
    radius_count,
    WeatherStation,
)
from urbanlens.geo import GeoPoint, ProjectedPoint, project, unproject
from urbanlens.prediction import (
    build_trip_matrix,
    g_mean,
    prediction_grid,
    split_indices,
    undersample,
)
from urbanlens.quadtree import build_index, build_index_projected
from urbanlens.server import create_app
from urbanlens.streets import build_graph, nearest_corner
from urbanlens.trips import synth_trips
from urbanlens.workspace import load_workspace, save_workspace

from conftest import CITY_ORIGIN, grid_streets, random_geopoints


def ok(name):
    print(f"\n[PASS] {name}")


# -------------------------------------------------------------------------------
# 1. KNN oracle: exact equality with brute force at 1k and 10k points, and
#    query latency < 1 ms per call at 10k points.
# -------------------------------------------------------------------------------


def brute_knn(projected, q, k):
    scored = []
    for x, y, pid in projected:
        dx = x - q.x
        dy = y - q.y
        scored.append((dx * dx + dy * dy, pid))
    scored.sort()
    top = scored[: min(k, len(scored))]
    return [pid for _, pid in top], (math.sqrt(top[-1][0]) if top else 0.0)


def test_knn_oracle_and_latency():
    rng = np.random.default_rng(2025)
    for n in (1000, 10_000):
        points = random_geopoints(n, seed=n)
        tree = build_index(points, CITY_ORIGIN)
        projected = [(project(p, CITY_ORIGIN).x, project(p, CITY_ORIGIN).y, i) for p, i in points]
        for k in (1, 10, 100):
            for _ in range(10):
                q = ProjectedPoint(float(rng.uniform(-5500, 5500)), float(rng.uniform(-5500, 5500)))
                got = tree.knn(q, k)
                want_ids, want_radius = brute_knn(projected, q, k)
                assert got.members == want_ids, f"id mismatch at n={n} k={k}"
                assert got.radius == want_radius

    tree = build_index(random_geopoints(10_000, seed=10_000), CITY_ORIGIN)
    queries = [
        ProjectedPoint(float(a), float(b))
        for a, b in np.random.default_rng(8).uniform(-5000, 5000, size=(200, 2))
    ]
    start = time.perf_counter()
    for q in queries:
        tree.knn(q, 100)
    per_call = (time.perf_counter() - start) / len(queries)
    assert per_call < 1e-3, f"knn too slow: {per_call*1e3:.2f} ms per call"
    ok(f"KNN oracle: exact match vs brute force at 1k/10k points; {per_call*1e3:.2f} ms/query at 10k")


# -------------------------------------------------------------------------------
# 2. Lens adaptivity: dense-cluster radius strictly below sparse-field radius.
# -------------------------------------------------------------------------------


def test_lens_adaptivity():
    rng = np.random.default_rng(42)
    dense = ProjectedPoint(-2500.0, -2500.0)
    sparse = ProjectedPoint(2500.0, 2500.0)
    pts = []
    for i in range(500):
        pts.append((ProjectedPoint(dense.x + float(rng.normal(0, 60)),
                                   dense.y + float(rng.normal(0, 60))), i))
    for i in range(500, 1000):
        pts.append((ProjectedPoint(sparse.x + float(rng.normal(0, 1200)),
                                   sparse.y + float(rng.normal(0, 1200))), i))
    tree = build_index_projected(pts, CITY_ORIGIN)
    dense_r = tree.knn(dense, 100).radius
    sparse_r = tree.knn(sparse, 100).radius
    assert dense_r < sparse_r
    ok(f"Lens adaptivity: dense radius {dense_r:.0f} m < sparse radius {sparse_r:.0f} m at k=100")


# -------------------------------------------------------------------------------
# 3. Temporal window trace for counts [5,3,2,4], target 6.
# -------------------------------------------------------------------------------


def test_temporal_window_trace():
    h = temporal.histogram_from_counts([5, 3, 2, 4])
    w = temporal.initial_window(h, 6)
    trace = [(w.lo, w.hi)]
    directions = [w.direction]
    for _ in range(3):
        w = temporal.step(h, w)
        trace.append((w.lo, w.hi))
        directions.append(w.direction)
    assert trace[:3] == [(0, 1), (0, 2), (2, 3)]
    assert directions[:3] == [temporal.Direction.FORWARD] * 3
    assert directions[3] is temporal.Direction.BACKWARD  # reversal after the last bin
    w = temporal.initial_window(h, 6)
    for _ in range(16):
        assert h.window_count(w.lo, w.hi) >= 6
        w = temporal.step(h, w)
    ok("Temporal window trace: [0,1] -> [0,2] -> [2,3], reversal at the end, frames >= 6")


# -------------------------------------------------------------------------------
# 4. Aggregation oracles: nearest corner, 200 m counts, 500 m favela flag,
#    census boundary averaging, inverse-distance weather (1e-9).
# -------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def oracle_graph():
    return build_graph(grid_streets(10, 10, 180.0), origin=CITY_ORIGIN)


def test_aggregation_oracles(oracle_graph):
    g = oracle_graph
    rng = np.random.default_rng(7)

    # nearest corner vs brute-force scan, 1000 random probes
    for _ in range(1000):
        x, y = float(rng.uniform(-400, 2000)), float(rng.uniform(-400, 2000))
        p = unproject(ProjectedPoint(x, y), CITY_ORIGIN)
        got = nearest_corner(g, p)
        q = project(p, CITY_ORIGIN)
        want = min(
            range(g.node_count),
            key=lambda i: ((g.node_x[i] - q.x) ** 2 + (g.node_y[i] - q.y) ** 2, i),
        )
        assert got == want

    # 200 m transport counts vs brute-force filter (inclusive boundary)
    cats = ("bus_stop", "terminal", "subway", "train")
    facilities = [
        (float(rng.uniform(-300, 1900)), float(rng.uniform(-300, 1900)), cats[int(rng.integers(0, 4))])
        for _ in range(400)
    ]
    facilities.append((g.node_x[0] + 200.0, g.node_y[0], "subway"))  # exactly on the boundary
    for node in range(0, g.node_count, 7):
        got = radius_count(g, facilities, node, 200.0)
        want = {c: 0 for c in cats}
        for x, y, c in facilities:
            if math.hypot(x - g.node_x[node], y - g.node_y[node]) <= 200.0:
                want[c] += 1
        assert got == want

    # 500 m favela flag vs shapely distance oracle
    polys_xy = [
        [(300.0, 300.0), (700.0, 300.0), (700.0, 700.0), (300.0, 700.0)],
        [(1500.0, -200.0), (1800.0, -200.0), (1800.0, 100.0), (1500.0, 100.0)],
    ]
    shapely_polys = [Polygon(p) for p in polys_xy]
    for node in range(g.node_count):
        got = favela_flag(g, node, [[p] for p in polys_xy], 500.0)
        want = int(any(sp.distance(Point(g.node_x[node], g.node_y[node])) <= 500.0 for sp in shapely_polys))
        assert got == want

    # census assignment: containment, boundary averaging, nearest fallback
    tract_a = CensusTract(
        rings=[[(-100.0, -100.0), (540.0, -100.0), (540.0, 2000.0), (-100.0, 2000.0)]],
        values=tuple(float(v) for v in range(1, 8)), population=10,
    )
    tract_b = CensusTract(
        rings=[[(540.0, -100.0), (1200.0, -100.0), (1200.0, 2000.0), (540.0, 2000.0)]],
        values=tuple(float(v * 3) for v in range(1, 8)), population=10,
    )
    tracts = [tract_a, tract_b]
    for node in range(g.node_count):
        got = census_assign(g, node, tracts, epsilon_m=1.0)
        x, y = g.node_x[node], g.node_y[node]
        d = [
            Polygon(t.rings[0]).distance(Point(x, y)) if not Polygon(t.rings[0]).contains(Point(x, y)) else 0.0
            for t in tracts
        ]
        within = [i for i, dist in enumerate(d) if dist <= 1.0]
        if within:
            want = tuple(float(np.mean([tracts[i].values[j] for i in within])) for j in range(7))
        else:
            want = tracts[int(np.argmin(d))].values
        assert got == pytest.approx(want, abs=1e-12)
    # the shared edge x=540 sits exactly on the column-3 nodes (x = 3*180)
    edge_node = 3
    assert census_assign(g, edge_node, tracts, epsilon_m=1.0) == tuple(
        (a + b) / 2 for a, b in zip(tract_a.values, tract_b.values)
    )

    # inverse-distance weather vs direct formula, within 1e-9
    stations = [
        WeatherStation("A", -500.0, -500.0, {"2020-01": (25.0, 15.0, 100.0)}),
        WeatherStation("B", 2200.0, 0.0, {"2020-01": (20.0, 12.0, 60.0)}),
        WeatherStation("C", 0.0, 2200.0, {"2020-01": (18.0, 10.0, 40.0)}),
    ]
    for node in range(0, g.node_count, 5):
        got = idw_weather(g, node, stations, "2020-01")
        x, y = g.node_x[node], g.node_y[node]
        dists = [math.hypot(x - s.x, y - s.y) for s in stations]
        if min(dists) < 1.0:
            want = stations[int(np.argmin(dists))].series["2020-01"]
        else:
            weights = [1.0 / d for d in dists]
            total = sum(weights)
            want = tuple(
                sum(wt * s.series["2020-01"][j] for wt, s in zip(weights, stations)) / total
                for j in range(3)
            )
        assert got == pytest.approx(want, abs=1e-9)
    ok("Aggregation oracles: nearest corner, 200 m counts, 500 m favela flag, census averaging, IDW (1e-9)")


# -------------------------------------------------------------------------------
# 5. Trip synthesis: 87k trips < 60 s; imbalance within +/-30% of 1/91; every
#    occurrence trip has a <= 500 m hotspot endpoint.
# -------------------------------------------------------------------------------


def test_trip_synthesis_87k(desk_workspace):
    w = desk_workspace
    from urbanlens.pipeline import prepared_tracts

    start = time.perf_counter()
    table = synth_trips(w.graph, prepared_tracts(w), w.hotspots, n=87_000, seed=7)
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    fraction = table.occurrence_count / len(table)
    assert abs(fraction - 1 / 91) <= 0.3 / 91

    g = w.graph
    hot = [h.node for h in w.hotspots if h.is_hotspot]
    hx = np.array([g.node_x[h] for h in hot])
    hy = np.array([g.node_y[h] for h in hot])

    def near(node):
        return bool((np.hypot(hx - g.node_x[node], hy - g.node_y[node]) <= 500.0).any())

    near_cache = {n: near(n) for n in set(table.origin_nodes.tolist()) | set(table.dest_nodes.tolist())}
    violations = sum(
        1
        for i in np.flatnonzero(table.labels == 1)
        if not (near_cache[int(table.origin_nodes[i])] or near_cache[int(table.dest_nodes[i])])
    )
    assert violations == 0
    ok(f"Trip synthesis: 87k trips in {elapsed:.1f}s, occurrence share {fraction:.5f} (~1/91), 0 label violations")


# -------------------------------------------------------------------------------
# 6. Pipeline G-mean >= 0.8 on the desk-scale city; label-shuffled control < 0.6.
# -------------------------------------------------------------------------------


def test_pipeline_g_mean(desk_workspace):
    w = desk_workspace
    score = w.evaluation["g_mean"]
    assert score >= 0.8, f"held-out G-mean {score:.3f} below 0.8"

    from urbanlens.features import FeatureTable

    X, y = build_trip_matrix(FeatureTable(w.features), w.trips)
    rng = np.random.default_rng(777)
    y_shuffled = y[rng.permutation(len(y))]
    train_idx, test_idx = split_indices(len(y), 0.2, 5)
    Xb, yb = undersample(X[train_idx], y_shuffled[train_idx], seed=29)
    control = train_gbt(Xb, yb.astype(float), GBTParams(rounds=100, depth=4, learning_rate=0.2))
    control_score = g_mean(control.predict(X[test_idx]), y_shuffled[test_idx])
    assert control_score < 0.6, f"shuffled control too high: {control_score:.3f}"
    ok(f"Pipeline G-mean: held-out {score:.3f} >= 0.8; label-shuffled control {control_score:.3f} < 0.6")


# -------------------------------------------------------------------------------
# 7. Grid conservation: totals equal 2x evaluated trips; fixture matches brute force.
# -------------------------------------------------------------------------------


def test_grid_conservation(desk_workspace):
    w = desk_workspace
    assert w.grid.total == 2 * w.evaluation["heldout_trips"]

    g = build_graph(grid_streets(6, 6, 400.0), origin=CITY_ORIGIN)
    rng = np.random.default_rng(3)
    n = 100
    X = rng.normal(size=(n, 3))
    labels = (X[:, 0] > 0).astype(np.int8)
    origins = rng.integers(0, g.node_count, n)
    dests = rng.integers(0, g.node_count, n)
    model = train_gbt(X, labels.astype(float), GBTParams(rounds=8, depth=2, learning_rate=0.5))
    grid = prediction_grid(model, X, labels, origins, dests, g, cell_m=500.0)
    assert grid.total == 2 * n

    preds = model.predict(X)
    succ = np.zeros((grid.nx, grid.ny), dtype=int)
    fail = np.zeros((grid.nx, grid.ny), dtype=int)
    for i in range(n):
        for node in (origins[i], dests[i]):
            ix = min(int((g.node_x[node] - grid.min_x) // 500.0), grid.nx - 1)
            iy = min(int((g.node_y[node] - grid.min_y) // 500.0), grid.ny - 1)
            if preds[i] == labels[i]:
                succ[ix, iy] += 1
            else:
                fail[ix, iy] += 1
    assert np.array_equal(grid.success, succ) and np.array_equal(grid.failure, fail)
    ok(f"Grid conservation: totals = 2 x trips ({w.grid.total} = 2 x {w.evaluation['heldout_trips']}); fixture matches brute force")


# -------------------------------------------------------------------------------
# 8. Shapley: exact efficiency < 1e-9 on <= 10-feature models; MC(2000) within
#    0.05 of exact on a 3-feature tree; linear closed form reproduced exactly.
# -------------------------------------------------------------------------------


def test_shapley_criteria():
    rng = np.random.default_rng(12)
    X8 = rng.normal(size=(300, 8))
    y8 = ((X8[:, 0] + 0.5 * X8[:, 3] * X8[:, 5]) > 0).astype(float)
    model8 = train_gbt(X8, y8, GBTParams(rounds=40, depth=3, learning_rate=0.3))
    background = X8.mean(axis=0)
    for i in range(5):
        x = X8[i]
        phi = shapley_exact(model8.predict_margin, x, background)
        f_x = model8.predict_margin(x[None, :])[0]
        f_bg = model8.predict_margin(background[None, :])[0]
        assert abs(phi.sum() - (f_x - f_bg)) < 1e-9

    X3 = rng.normal(size=(400, 3))
    y3 = ((X3[:, 0] > 0.2) | (X3[:, 1] < -0.5)).astype(float)
    tree_model = train_gbt(X3, y3, GBTParams(rounds=30, depth=3, learning_rate=0.3))
    bg3 = X3.mean(axis=0)
    x3 = X3[7]
    exact = shapley_exact(tree_model.predict_margin, x3, bg3)
    mc = shapley_monte_carlo(tree_model.predict_margin, x3, bg3, permutations=2000, seed=4)
    assert np.abs(mc - exact).max() < 0.05

    linear = lambda X: 2.0 * X[:, 0] + 3.0 * X[:, 1]
    phi = shapley_exact(linear, np.array([1.0, 1.0]), np.zeros(2))
    assert phi[0] == 2.0 and phi[1] == 3.0
    ok("Shapley: exact efficiency < 1e-9; MC(2000) within 0.05 of exact; linear closed form exact")


# -------------------------------------------------------------------------------
# 9. Correlation: 52x52 bounds/symmetry/unit diagonal; reduced 8x8; block-mean
#    hand oracle on a 4-feature/2-layer fixture.
# -------------------------------------------------------------------------------


def test_correlation_criteria(desk_workspace):
    r = desk_workspace.correlation
    assert r.full.shape == (52, 52)
    assert (r.full <= 1.0).all() and (r.full >= -1.0).all()
    assert np.array_equal(r.full, r.full.T)
    assert np.array_equal(np.diag(r.full), np.ones(52))
    assert r.reduced.shape == (8, 8)

    # hand oracle: 2 layers of 2 features with a known cross block
    full = np.eye(4)
    full[0, 1] = full[1, 0] = 0.3
    full[2, 3] = full[3, 2] = 0.7
    full[0, 2] = full[2, 0] = 0.2
    full[0, 3] = full[3, 0] = 0.4
    full[1, 2] = full[2, 1] = 0.6
    full[1, 3] = full[3, 1] = 0.8
    reduced, _ = reduce_by_layer(full, ["a", "a", "b", "b"], layers=("a", "b"))
    assert reduced[0, 0] == 0.3 and reduced[1, 1] == 0.7
    assert reduced[0, 1] == pytest.approx((0.2 + 0.4 + 0.6 + 0.8) / 4, abs=1e-15)
    ok("Correlation: bounds/symmetry/diagonal on 52x52; reduced 8x8; block-mean oracle exact")


# -------------------------------------------------------------------------------
# 10. Round-trip: save/load preserves every API response byte-identically.
# -------------------------------------------------------------------------------


def test_round_trip_api_responses(desk_workspace, tmp_path):
    path = tmp_path / "ws.json.gz"
    save_workspace(desk_workspace, path)
    reloaded = load_workspace(path)

    requests = [
        ("/api/health", None),
        ("/api/layers", None),
        ("/api/layers/1/features", {"bbox": "-46.66,-23.58,-46.60,-23.52"}),
        ("/api/layers/2/features", {"bbox": "-46.66,-23.58,-46.63,-23.55"}),
        ("/api/layers/5/features", None),
        ("/api/layers/6/features", None),
        ("/api/layers/7/features", {"bbox": "-46.66,-23.58,-46.63,-23.55"}),
        ("/api/layers/8/features", None),
        ("/api/layers/9/features", None),
        ("/api/lens/spatial", {"layer": 1, "lon": -46.63, "lat": -23.55, "k": 100}),
        ("/api/lens/spatial", {"layer": 8, "lon": -46.64, "lat": -23.56, "k": 5}),
        ("/api/temporal/1/histogram", {"granularity": "month"}),
        ("/api/temporal/1/histogram", {"granularity": "hour"}),
        ("/api/temporal/2/histogram", {"granularity": "weekday"}),
        ("/api/prediction/grid", None),
        ("/api/prediction/evaluation", None),
        ("/api/analytics/correlation", None),
        ("/api/analytics/shapley", None),
        ("/api/graph/nodes", {"bbox": "-46.65,-23.57,-46.61,-23.53"}),
    ]
    with TestClient(create_app(desk_workspace)) as a, TestClient(create_app(reloaded)) as b:
        for path_, params in requests:
            ra = a.get(path_, params=params)
            rb = b.get(path_, params=params)
            assert ra.status_code == rb.status_code
            assert ra.content == rb.content, f"response drift at {path_}"
        body = {"layer": 1, "granularity": "month", "mode": "count", "value": 500}
        wa = a.post("/api/temporal/window", json=body)
        wb = b.post("/api/temporal/window", json=body)
        assert wa.content == wb.content
    ok(f"Round-trip: {len(requests) + 1} API responses byte-identical after save/load")
