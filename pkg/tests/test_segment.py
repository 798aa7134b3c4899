from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jordansweep import ClosedPolyline, EndKind, horizontal_segment_at, open_segment_at, vertical_line_hits
from jordansweep.errors import PointOnCurve
from jordansweep.oracle import brute_force_open_segment

from conftest import random_polygons


def test_square_interior_chord(square):
    s = open_segment_at(square, (0.5, 0.5))
    assert (s.x, s.y_low, s.y_high) == (0.5, 0.0, 1.0)
    assert s.low_kind is EndKind.ON_CURVE and s.high_kind is EndKind.ON_CURVE


def test_square_point_above(square):
    s = open_segment_at(square, (0.5, 2.0))
    assert s.y_low == 1.0 and s.low_kind is EndKind.ON_CURVE
    assert s.y_high == math.inf and s.high_kind is EndKind.INFINITE
    assert not s.finite


def test_c_shape_lower_arm(c_shape):
    s = open_segment_at(c_shape, (1.5, 0.5))
    assert (s.y_low, s.y_high) == (0.0, 1.0)


def test_c_shape_upper_arm_matches_oracle(c_shape):
    s = open_segment_at(c_shape, (1.5, 2.5))
    o = brute_force_open_segment(c_shape.vertices, (1.5, 2.5))
    assert (s.y_low, s.y_high) == (o.y_low, o.y_high) == (2.0, 3.0)


def test_point_on_curve(square):
    with pytest.raises(PointOnCurve):
        open_segment_at(square, (0.5, 0.0))
    with pytest.raises(PointOnCurve):
        horizontal_segment_at(square, (1.0, 0.5))


def test_point_on_vertical_edge_overlap(c_shape):
    with pytest.raises(PointOnCurve):
        open_segment_at(c_shape, (2.0, 1.5))


def test_touch_terminates_segment(triangle):
    s = open_segment_at(triangle, (1.0, 0.5))
    assert (s.y_low, s.y_high) == pytest.approx((0.0, 2.0))


@pytest.mark.parametrize(
    "p, expected",
    [((0.5, 0.5), (0.0, 1.0))],
)
def test_horizontal_square(square, p, expected):
    t = horizontal_segment_at(square, p)
    assert (t.x_left, t.x_right) == expected


def test_horizontal_c_shape(c_shape):
    assert (horizontal_segment_at(c_shape, (0.5, 0.5)).x_left, horizontal_segment_at(c_shape, (0.5, 0.5)).x_right) == (0, 3)
    t = horizontal_segment_at(c_shape, (0.5, 2.5))
    assert (t.y, t.x_left, t.x_right) == (2.5, 0, 3)


def test_maximality(c_shape):
    s = open_segment_at(c_shape, (2.5, 1.5))
    eps = c_shape.eps
    for y_end in (s.y_low, s.y_high):
        hits = vertical_line_hits(c_shape, s.x).hits
        assert any(h.lo - 10 * eps <= y_end <= h.hi + 10 * eps for h in hits)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.floats(0, 1), st.floats(0, 1))
def test_agrees_with_brute_force(seed, fx, fy):
    c = ClosedPolyline(random_polygons(1, seed=seed)[0])
    bb = c.bbox
    p = (bb.min.x + fx * bb.width, bb.min.y + fy * bb.height)
    if c.distance([p])[0] <= 10 * c.eps or np.min(np.abs(c.vertices[:, 0] - p[0])) <= 10 * c.eps:
        return
    s = open_segment_at(c, p)
    o = brute_force_open_segment(c.vertices, p)
    assert s.y_low < p[1] < s.y_high
    for a, b in ((s.y_low, o.y_low), (s.y_high, o.y_high)):
        assert a == b or abs(a - b) <= c.eps
