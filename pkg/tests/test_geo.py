import math

import pytest

from urbanlens.geo import (
    EARTH_RADIUS_M,
    GeoPoint,
    ProjectedPoint,
    centroid_origin,
    project,
    unproject,
)


def test_projecting_origin_is_zero():
    p = GeoPoint(-23.55, -46.63)
    out = project(p, p)
    assert out == ProjectedPoint(0.0, 0.0)


def test_one_degree_east_at_equator():
    # oracle: meters per degree of longitude at the equator is R * pi / 180
    expected_x = EARTH_RADIUS_M * math.pi / 180.0
    out = project(GeoPoint(0.0, 1.0), GeoPoint(0.0, 0.0))
    assert out.x == pytest.approx(expected_x, abs=1e-6)
    assert out.x == pytest.approx(111194.9, abs=0.1)
    assert out.y == 0.0


def test_latitude_antisymmetry_on_shared_lon():
    a = GeoPoint(-23.0, -46.6)
    b = GeoPoint(-24.0, -46.6)
    assert project(a, b).y == -project(b, a).y


def test_round_trip_error_below_micron_near_origin():
    origin = GeoPoint(-23.55, -46.63)
    p = GeoPoint(-23.55001, -46.63002)
    back = unproject(project(p, origin), origin)
    dx, dy = project(back, origin).x - project(p, origin).x, project(back, origin).y - project(p, origin).y
    assert math.hypot(dx, dy) < 1e-6


def test_coordinate_range_validation():
    with pytest.raises(ValueError):
        GeoPoint(91.0, 0.0)
    with pytest.raises(ValueError):
        GeoPoint(0.0, 181.0)


def test_centroid_origin():
    pts = [(0.0, 0.0), (2.0, 4.0)]
    c = centroid_origin(pts)
    assert (c.lat, c.lon) == (1.0, 2.0)
    with pytest.raises(ValueError):
        centroid_origin([])
