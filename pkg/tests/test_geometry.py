import math

import pytest

from urbanlens.geometry import (
    point_in_ring,
    polygon_centroid,
    polygon_distance,
    ring_area,
    rings_bbox,
    segment_dist_sq,
)

SQUARE = [(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)]


def test_point_in_ring():
    assert point_in_ring(5.0, 5.0, SQUARE)
    assert not point_in_ring(15.0, 5.0, SQUARE)
    assert not point_in_ring(-1.0, -1.0, SQUARE)


def test_segment_distance():
    # point above the middle of a horizontal segment
    assert segment_dist_sq(5.0, 3.0, 0.0, 0.0, 10.0, 0.0) == 9.0
    # beyond the end: distance to the endpoint
    assert segment_dist_sq(13.0, 4.0, 0.0, 0.0, 10.0, 0.0) == 25.0
    # degenerate zero-length segment
    assert segment_dist_sq(3.0, 4.0, 0.0, 0.0, 0.0, 0.0) == 25.0


def test_polygon_distance_zero_inside():
    assert polygon_distance(5.0, 5.0, [SQUARE]) == 0.0


def test_polygon_distance_outside():
    assert polygon_distance(13.0, 5.0, [SQUARE]) == pytest.approx(3.0, abs=1e-12)
    assert polygon_distance(13.0, 14.0, [SQUARE]) == pytest.approx(5.0, abs=1e-12)


def test_ring_area_and_orientation():
    assert ring_area(SQUARE) == 100.0
    assert ring_area(list(reversed(SQUARE))) == -100.0


def test_polygon_centroid():
    assert polygon_centroid([SQUARE]) == (5.0, 5.0)
    # degenerate (collinear) ring falls back to vertex mean
    line = [(0.0, 0.0), (2.0, 0.0), (4.0, 0.0)]
    assert polygon_centroid([line]) == (2.0, 0.0)


def test_rings_bbox():
    assert rings_bbox([SQUARE]) == (0.0, 0.0, 10.0, 10.0)
