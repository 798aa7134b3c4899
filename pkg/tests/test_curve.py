from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jordansweep import (
    ClosedPolyline,
    HitKind,
    koch_generate,
    load_curve,
    read_curve,
    regular_ngon,
    remove_degeneracy,
    vertical_line_hits,
)
from jordansweep.curve import DEGENERACY_STEP, horizontal_line_hits
from jordansweep.errors import DegenerateEdge, LevelTooLarge, NonSimpleCurve, TooFewVertices
from jordansweep.oracle import shoelace_area, simplicity_check

from conftest import C_SHAPE, SQUARE, random_polygons


def brute_vertical_hits(v: np.ndarray, x: float, tol: float) -> list[tuple[float, float]]:
    """Edge-by-edge intersection of the line at ``x`` with every edge, merged."""
    out = []
    n = len(v)
    for i in range(n):
        (ax, ay), (bx, by) = v[i], v[(i + 1) % n]
        if abs(ax - x) <= tol and abs(bx - x) <= tol:
            out.append((min(ay, by), max(ay, by)))
        elif min(ax, bx) - tol <= x <= max(ax, bx) + tol and ax != bx:
            s = min(1.0, max(0.0, (x - ax) / (bx - ax)))
            y = ay + s * (by - ay)
            out.append((y, y))
    out.sort()
    merged: list[list[float]] = []
    for lo, hi in out:
        if merged and lo <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [tuple(m) for m in merged]


class TestConstruction:
    def test_clockwise_input_is_reoriented(self):
        c = ClosedPolyline(SQUARE[::-1])
        assert c.signed_area > 0
        assert shoelace_area(c.vertices) == pytest.approx(1.0)

    def test_closing_vertex_is_dropped(self):
        c = ClosedPolyline(SQUARE + [SQUARE[0]])
        assert len(c) == 4

    def test_too_few_vertices(self):
        with pytest.raises(TooFewVertices):
            ClosedPolyline([(0, 0), (1, 0)])

    def test_degenerate_edge(self):
        with pytest.raises(DegenerateEdge):
            ClosedPolyline([(0, 0), (1, 0), (1, 0), (0, 1)])

    def test_bowtie_rejected(self):
        with pytest.raises(NonSimpleCurve):
            ClosedPolyline([(0, 0), (1, 1), (1, 0), (0, 1)])

    def test_vertices_are_read_only(self, square):
        with pytest.raises(ValueError):
            square.vertices[0, 0] = 5.0

    def test_bbox_and_eps(self, c_shape):
        bb = c_shape.bbox
        assert (bb.min.x, bb.min.y, bb.max.x, bb.max.y) == (0, 0, 3, 3)
        assert c_shape.eps == pytest.approx(1e-9 * math.hypot(3, 3))

    def test_distance(self, square):
        d = square.distance([(0.5, 0.5), (2.0, 0.5), (0.0, 0.3)])
        assert d == pytest.approx([0.5, 1.0, 0.0])


class TestLoadCurve:
    def test_regular_square(self):
        c = load_curve({"type": "regular", "n": 4, "radius": 1, "center": [0, 0]})
        assert len(c) == 4
        assert np.allclose(np.hypot(*c.vertices.T), 1.0)
        # rotated 45 degrees: no two vertices share an x or y with the axis-aligned square
        assert np.allclose(np.sort(np.abs(c.vertices[:, 0])), [0, 0, 1, 1], atol=1e-12)

    def test_koch_zero_is_triangle(self):
        c = load_curve({"type": "koch", "level": 0})
        assert len(c) == 3

    def test_koch_four_edge_count(self):
        assert len(load_curve({"type": "koch", "level": 4})) == 3 * 4**4

    def test_polyline_and_file_round_trip(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"type": "polyline", "vertices": C_SHAPE}))
        c = read_curve(path)
        assert c.signed_area == pytest.approx(7.0)
        assert load_curve(c.to_json()).signed_area == pytest.approx(7.0)

    def test_unknown_type(self):
        with pytest.raises(ValueError):
            load_curve({"type": "circle"})


class TestKoch:
    def test_level_one_edges(self):
        c = koch_generate(1)
        x0, y0, x1, y1 = c.edges
        assert len(c) == 12
        assert np.allclose(np.hypot(x1 - x0, y1 - y0), 1 / 3)

    @pytest.mark.parametrize("level", range(5))
    def test_perimeter(self, level):
        c = koch_generate(level)
        assert c.perimeter == pytest.approx(3 * (4 / 3) ** level, rel=1e-12)

    @pytest.mark.parametrize("level", range(5))
    def test_area_closed_form(self, level):
        a0 = math.sqrt(3) / 4
        expected = a0 * (8 / 5 - 3 / 5 * (4 / 9) ** level)
        assert shoelace_area(koch_generate(level).vertices) == pytest.approx(expected, rel=1e-12)

    def test_level_four_signed_area_matches_oracle(self):
        c = koch_generate(4)
        assert c.signed_area == pytest.approx(shoelace_area(c.vertices), rel=1e-12)

    @pytest.mark.parametrize("level", [3, 4])
    def test_simple_by_quadratic_scan(self, level):
        assert simplicity_check(koch_generate(level).vertices).simple

    def test_level_too_large(self):
        with pytest.raises(LevelTooLarge):
            koch_generate(12)


class TestRemoveDegeneracy:
    def test_square_rotated_by_one_step(self, square):
        out, theta = remove_degeneracy(square)
        assert theta == pytest.approx(DEGENERACY_STEP)
        x0, _, x1, _ = out.edges
        assert np.all(np.abs(x1 - x0) > 0)

    def test_triangle_unchanged(self, triangle):
        out, theta = remove_degeneracy(triangle)
        assert theta == 0.0
        assert np.array_equal(out.vertices, triangle.vertices)

    def test_two_step_case(self):
        d = DEGENERACY_STEP
        # edge directions 0, pi/2 + d, pi (i.e. 0 mod pi) and pi/2 + pi
        c = ClosedPolyline([(0, 0), (1, 0), (1 - math.tan(d), 1), (0, 1)])
        out, theta = remove_degeneracy(c)
        assert theta == pytest.approx(2 * d)
        v = out.vertices
        w = np.roll(v, -1, axis=0)
        ang = np.arctan2(w[:, 1] - v[:, 1], w[:, 0] - v[:, 0])
        off = np.abs(np.mod(ang - np.pi / 2, np.pi))
        assert np.min(np.minimum(off, np.pi - off)) >= 1e-6

    def test_area_preserved(self, c_shape):
        out, _ = remove_degeneracy(c_shape)
        assert out.signed_area == pytest.approx(7.0)


class TestLineHits:
    def test_square_midline(self, square):
        hits = vertical_line_hits(square, 0.5).hits
        assert [(h.lo, h.hi, h.kind) for h in hits] == [(0, 0, HitKind.CROSSING), (1, 1, HitKind.CROSSING)]

    def test_c_shape_midline(self, c_shape):
        hits = vertical_line_hits(c_shape, 1.5).hits
        assert [h.lo for h in hits] == [0, 1, 2, 3]
        assert all(h.kind is HitKind.CROSSING for h in hits)

    def test_c_shape_edge_overlap(self, c_shape):
        hits = vertical_line_hits(c_shape, 2.0).hits
        kinds = [(h.lo, h.hi, h.kind) for h in hits]
        assert (1.0, 2.0, HitKind.EDGE_OVERLAP) in kinds
        assert kinds[0][:2] == (0, 0) and kinds[-1][:2] == (3, 3)

    def test_apex_with_neighbours_on_both_sides_is_crossing(self, triangle):
        hits = vertical_line_hits(triangle, 1.0).hits
        assert hits[-1].kind is HitKind.CROSSING
        assert hits[-1].lo == pytest.approx(2.0)

    def test_extreme_vertex_is_touch(self, triangle):
        hits = vertical_line_hits(triangle, 2.0).hits
        assert [(h.lo, h.kind) for h in hits] == [(0.0, HitKind.TOUCH)]
        assert not hits[0].crossing

    def test_horizontal_query(self, c_shape):
        hits = horizontal_line_hits(c_shape, 1.5).hits
        assert [(h.lo, h.hi) for h in hits] == [(2.0, 2.0), (3.0, 3.0)]

    def test_ranged_query_matches_full(self, c_shape):
        full = vertical_line_hits(c_shape, 1.5).hits
        part = vertical_line_hits(c_shape, 1.5, 0.5, 2.5).hits
        assert [h.lo for h in part] == [h.lo for h in full if 0.5 <= h.lo <= 2.5]

    def test_random_lines_match_brute_force(self):
        rng = np.random.default_rng(7)
        checked = 0
        for v in random_polygons(40, seed=11):
            c = ClosedPolyline(v)
            bb = c.bbox
            for x in bb.min.x + bb.width * rng.random(250):
                got = [(h.lo, h.hi) for h in vertical_line_hits(c, x).hits]
                want = brute_vertical_hits(c.vertices, x, c.eps)
                assert len(got) == len(want)
                assert np.allclose(got, want, atol=c.eps, rtol=0)
                checked += 1
        assert checked == 10**4

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6), st.floats(0.01, 0.99))
    def test_crossing_parity_is_even(self, seed, frac):
        v = random_polygons(1, seed=seed)[0]
        c = ClosedPolyline(v)
        x = c.bbox.min.x + frac * c.bbox.width
        if np.min(np.abs(c.vertices[:, 0] - x)) < 1e-7:
            return
        hits = vertical_line_hits(c, x).hits
        assert sum(h.crossing for h in hits) % 2 == 0
