import math

import numpy as np
import pytest

from urbanlens.geo import GeoPoint, ProjectedPoint, project
from urbanlens.quadtree import build_index, build_index_projected

from conftest import CITY_ORIGIN, random_geopoints


def brute_knn(projected, q, k):
    """Independent oracle: full sort by (squared distance, id)."""
    scored = []
    for x, y, pid in projected:
        dx = x - q.x
        dy = y - q.y
        scored.append((dx * dx + dy * dy, pid))
    scored.sort()
    top = scored[: min(k, len(scored))]
    radius = math.sqrt(top[-1][0]) if top else 0.0
    return [pid for _, pid in top], radius


def as_projected(points, origin):
    out = []
    for p, pid in points:
        pp = project(p, origin)
        out.append((pp.x, pp.y, pid))
    return out


def test_empty_index_answers_empty():
    tree = build_index([], CITY_ORIGIN)
    assert len(tree) == 0
    res = tree.knn(ProjectedPoint(0.0, 0.0), 5)
    assert res.members == [] and res.radius == 0.0


def test_single_point_found_from_anywhere():
    p = GeoPoint(-23.55, -46.63)
    tree = build_index([(p, 42)], CITY_ORIGIN)
    res = tree.lens(GeoPoint(-23.4, -46.5), 1)
    assert res.members == [42]


def test_build_stores_all_points_and_respects_capacity():
    points = random_geopoints(10_000, seed=11)
    tree = build_index(points, CITY_ORIGIN, capacity=16, max_depth=24)
    sizes = list(tree.leaf_sizes())
    assert sum(count for _, count in sizes) == 10_000
    assert all(count <= 16 for depth, count in sizes if depth < 24)
    assert len(tree) == 10_000


def test_query_at_stored_point_returns_it_with_zero_radius():
    points = random_geopoints(50, seed=3)
    tree = build_index(points, CITY_ORIGIN)
    target = points[7][0]
    res = tree.lens(target, 1)
    assert res.members == [7]
    assert res.radius == 0.0


@pytest.mark.parametrize("k", [1, 10, 100])
def test_knn_matches_brute_force_exactly(k):
    points = random_geopoints(1000, seed=5)
    tree = build_index(points, CITY_ORIGIN)
    projected = as_projected(points, CITY_ORIGIN)
    rng = np.random.default_rng(99)
    for _ in range(25):
        q = ProjectedPoint(float(rng.uniform(-6000, 6000)), float(rng.uniform(-6000, 6000)))
        got = tree.knn(q, k)
        want_ids, want_radius = brute_knn(projected, q, k)
        assert got.members == want_ids
        assert got.radius == want_radius


def test_k_beyond_size_returns_everything():
    points = random_geopoints(25, seed=8)
    tree = build_index(points, CITY_ORIGIN)
    res = tree.knn(ProjectedPoint(0.0, 0.0), 100)
    assert len(res.members) == 25
    assert sorted(res.members) == list(range(25))


def test_k_zero_is_empty():
    points = random_geopoints(25, seed=8)
    tree = build_index(points, CITY_ORIGIN)
    res = tree.knn(ProjectedPoint(0.0, 0.0), 0)
    assert res.members == [] and res.radius == 0.0


def test_hundred_member_lens():
    points = random_geopoints(2000, seed=21)
    tree = build_index(points, CITY_ORIGIN)
    res = tree.lens(GeoPoint(CITY_ORIGIN.lat, CITY_ORIGIN.lon), 100)
    assert len(res.members) == 100
    last = project(points[res.members[-1]][0], CITY_ORIGIN)
    assert res.radius == math.sqrt(last.x * last.x + last.y * last.y)


def test_radius_monotone_in_k():
    points = random_geopoints(500, seed=13)
    tree = build_index(points, CITY_ORIGIN)
    q = ProjectedPoint(120.0, -340.0)
    radii = [tree.knn(q, k).radius for k in (1, 5, 20, 100, 400)]
    assert radii == sorted(radii)


def test_adding_a_point_never_grows_radius():
    base = random_geopoints(300, seed=17)
    extra = random_geopoints(40, seed=18)
    q = ProjectedPoint(50.0, 80.0)
    k = 25
    tree = build_index(base, CITY_ORIGIN)
    before = tree.knn(q, k).radius
    for p, _ in extra:
        grown = build_index(base + [(p, len(base))], CITY_ORIGIN)
        assert grown.knn(q, k).radius <= before


def test_dense_cluster_shrinks_lens_radius():
    rng = np.random.default_rng(4)
    dense_center = ProjectedPoint(-2000.0, -2000.0)
    sparse_center = ProjectedPoint(2000.0, 2000.0)
    pts = []
    for i in range(400):  # tight cluster
        pts.append((dense_center.x + float(rng.normal(0, 50)), dense_center.y + float(rng.normal(0, 50)), i))
    for i in range(400, 800):  # wide field
        pts.append((sparse_center.x + float(rng.normal(0, 900)), sparse_center.y + float(rng.normal(0, 900)), i))
    tree = build_index_projected(
        [(ProjectedPoint(x, y), i) for x, y, i in pts], CITY_ORIGIN
    )
    dense_r = tree.knn(dense_center, 100).radius
    sparse_r = tree.knn(sparse_center, 100).radius
    assert dense_r < sparse_r


def test_equal_distance_ties_break_by_ascending_id():
    pts = [
        (ProjectedPoint(10.0, 0.0), 7),
        (ProjectedPoint(-10.0, 0.0), 3),
        (ProjectedPoint(0.0, 10.0), 5),
    ]
    tree = build_index_projected(pts, CITY_ORIGIN)
    res = tree.knn(ProjectedPoint(0.0, 0.0), 2)
    assert res.members == [3, 5]


def test_query_radius_inclusive():
    pts = [(ProjectedPoint(0.0, 0.0), 0), (ProjectedPoint(200.0, 0.0), 1), (ProjectedPoint(201.0, 0.0), 2)]
    tree = build_index_projected(pts, CITY_ORIGIN)
    assert tree.query_radius(ProjectedPoint(0.0, 0.0), 200.0) == [0, 1]


def test_determinism_across_builds():
    points = random_geopoints(800, seed=55)
    q = ProjectedPoint(7.0, -13.0)
    a = build_index(points, CITY_ORIGIN).knn(q, 50)
    b = build_index(points, CITY_ORIGIN).knn(q, 50)
    assert a.members == b.members and a.radius == b.radius
