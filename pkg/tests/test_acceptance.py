"""Acceptance criteria 1 to 11.

Each test records exactly one PASS/FAIL line (printed in the terminal
summary and inline) and then asserts the same condition.  Criterion 4 has
hard functional targets and soft performance targets; the soft part is a
separate test with its own line so a missed timing stays visible without
hiding the functional result.
"""

from __future__ import annotations

import math
import statistics
import time

import numpy as np
import pytest

from jordansweep import (
    ClosedPolyline,
    EnginePolicy,
    Order,
    Verdict,
    build_index,
    classify_points,
    connectivity_path,
    exterior_sweep,
    interior_area,
    koch_generate,
    open_segment_at,
    run_sweep,
    sweeps_equivalent,
)
from jordansweep.classify import exterior_membership, path_is_interior
from jordansweep.engine import Verdict as RayVerdict
from jordansweep.errors import NoPath
from jordansweep.frontier import validate_boundary
from jordansweep.oracle import brute_force_open_segment, raycast_inside, shoelace_area, simplicity_check

from conftest import NAMED_CURVES, SQUARE, named_curve, random_polygons

RESULTS: dict[str, str] = {}

N_POLYGONS = 200
POLYGON_SEED = 2024
KOCH_LEVELS = (1, 2, 3, 4)
POLICIES = (Order.LARGEST_FIRST, Order.FIFO, Order.LIFO)


def record(key: str, ok: bool, detail: str) -> None:
    line = f"criterion {key:>3}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[key] = line
    print(line)


def uniform_in_box(curve: ClosedPolyline, n: int, rng: np.random.Generator, pad: float = 0.0) -> np.ndarray:
    bb = curve.bbox
    p = pad * bb.diagonal
    return np.column_stack([bb.min.x - p + (bb.width + 2 * p) * rng.random(n),
                            bb.min.y - p + (bb.height + 2 * p) * rng.random(n)])


def interior_samples(curve: ClosedPolyline, n: int, rng: np.random.Generator, collar: float) -> np.ndarray:
    out = np.empty((0, 2))
    while len(out) < n:
        cand = uniform_in_box(curve, 4 * n, rng)
        inside, on = raycast_inside(curve.vertices, cand)
        keep = inside & ~on & (curve.distance(cand) > collar)
        out = np.vstack([out, cand[keep]])
    return out[:n]


# ---------------------------------------------------------------------------
# shared runs
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def polygons() -> list[ClosedPolyline]:
    curves = [ClosedPolyline(v) for v in random_polygons(N_POLYGONS, seed=POLYGON_SEED)]
    assert all(simplicity_check(c.vertices).simple for c in curves)
    return curves


@pytest.fixture(scope="module")
def polygon_runs(polygons):
    t0 = time.perf_counter()
    states = [run_sweep(c) for c in polygons]
    areas = [interior_area(s) for s in states]
    elapsed = time.perf_counter() - t0
    return states, areas, elapsed


@pytest.fixture(scope="module")
def named_runs():
    """Maximal states of every named curve and Koch levels 1-4 under every policy."""
    names = list(NAMED_CURVES) + [f"koch{k}" for k in KOCH_LEVELS]
    return {(name, order): run_sweep(named_curve(name), None, EnginePolicy(order=order))
            for name in names for order in POLICIES}


@pytest.fixture(scope="module")
def polygon_policy_runs(polygons, polygon_runs):
    states = polygon_runs[0]
    return {
        Order.LARGEST_FIRST: states,
        Order.FIFO: [run_sweep(c, None, EnginePolicy(order=Order.FIFO)) for c in polygons],
        Order.LIFO: [run_sweep(c, None, EnginePolicy(order=Order.LIFO)) for c in polygons],
    }


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def test_criterion_01_rectangle_exactness():
    curve = ClosedPolyline(SQUARE)
    worst_err, steps, frontier, times = 0.0, set(), 0, []
    for order in POLICIES:
        policy = EnginePolicy(order=order)
        run_sweep(curve, None, policy)
        runs = []
        for _ in range(5):
            t0 = time.perf_counter()
            s = run_sweep(curve, None, policy)
            runs.append(time.perf_counter() - t0)
        times.append(statistics.median(runs))
        worst_err = max(worst_err, abs(s.total_area - 1.0))
        steps.add(s.step_count)
        frontier += len(s.frontier.vertical_index) + len(s.queue)
    t_ms = 1e3 * max(times)
    ok = worst_err <= 1e-9 and steps == {1} and frontier == 0 and t_ms < 10
    record("1", ok, f"area error {worst_err:.2e} (<= 1e-9), steps {sorted(steps)}, "
                    f"frontier {frontier}, median runtime {t_ms:.2f} ms (< 10 ms)")
    assert ok


def test_criterion_02_polygon_area(polygon_runs, polygons):
    _, areas, elapsed = polygon_runs
    rel = [abs(a - shoelace_area(c.vertices)) / shoelace_area(c.vertices) for a, c in zip(areas, polygons)]
    worst = max(rel)
    ok = worst <= 1e-8 and elapsed < 30
    record("2", ok, f"{N_POLYGONS} polygons, max relative area error {worst:.2e} (<= 1e-8), "
                    f"sweep time {elapsed:.1f} s (< 30 s)")
    assert ok


def test_criterion_03_classification(polygon_runs, polygons):
    states = polygon_runs[0]
    rng = np.random.default_rng(303)
    total = disagree = 0
    for s, c in zip(states, polygons):
        pts = uniform_in_box(c, 1000, rng, pad=0.05)
        inside, on = raycast_inside(c.vertices, pts)
        keep = ~on & (c.distance(pts) > c.eps)
        res = classify_points(build_index(s), c, pts[keep])
        got = np.array([r.verdict is Verdict.INTERIOR for r in res])
        bad = np.array([r.verdict in (Verdict.UNKNOWN, Verdict.ON_CURVE) for r in res])
        disagree += int(np.sum((got != inside[keep]) | bad))
        total += int(keep.sum())
    ok = disagree == 0
    record("3", ok, f"{disagree} disagreements in {total} points ({100 * (1 - disagree / total):.4f}% agreement, "
                    f"target 100%)")
    assert ok


def test_criterion_04_koch_regression(named_runs):
    s = named_runs[("koch4", Order.LARGEST_FIRST)]
    ref = shoelace_area(s.curve.vertices)
    rel = abs(s.total_area - ref) / ref
    empty = s.maximal and not s.frontier.vertical_index
    ok = empty and rel <= 1e-9 and len(s.curve) == 768
    record("4", ok, f"koch(4) {len(s.curve)} edges, frontier empty={empty}, relative area error {rel:.2e} (<= 1e-9)")
    assert ok


def test_criterion_04_soft_performance():
    curve = koch_generate(6)
    t0 = time.perf_counter()
    s = run_sweep(curve)
    t_run = time.perf_counter() - t0
    idx = build_index(s)
    pts = uniform_in_box(curve, 10**5, np.random.default_rng(4))
    t0 = time.perf_counter()
    idx.locate(pts)
    t_query = time.perf_counter() - t0
    t0 = time.perf_counter()
    classify_points(idx, curve, pts)
    t_classify = time.perf_counter() - t0
    ref = shoelace_area(curve.vertices)
    missing = ref - s.total_area
    short = sum(reason == "SegmentTooShort" for reason in s.retired.values())
    ok = t_run < 5 and t_query < 1
    record("4s", ok, f"koch(6) {len(curve)} edges swept in {t_run:.1f} s (soft target 5 s), "
                     f"1e5 index queries in {t_query:.2f} s (soft target 1 s), full classification "
                     f"{t_classify:.2f} s, missing area {missing:.2e} from {short} sub-eps_min pieces")
    # functional checks stay hard: the run finishes and the only unswept area is
    # the slivers behind pieces too short to extend
    assert s.maximal and not s.frontier.vertical_index
    assert 0 <= missing <= short * s.eps_min**2
    assert ok, "soft performance target missed"


def _all_runs(named_runs, polygon_policy_runs):
    yield from named_runs.values()
    for states in polygon_policy_runs.values():
        yield from states


def test_criterion_05_monotone_inner_measure(named_runs, polygon_policy_runs):
    runs = steps = over = 0
    worst = 0.0
    strict = within_rounding = True
    for s in _all_runs(named_runs, polygon_policy_runs):
        runs += 1
        h = s.area_history
        strict &= h[0] == s.tree[0].sweep.area > 0 and all(b > a for a, b in zip(h, h[1:]))
        for a, b, node in zip(h, h[1:], s.tree[1:]):
            steps += 1
            mismatch = abs((b - a) - node.sweep.area)
            rel = mismatch / node.sweep.area
            worst = max(worst, rel)
            over += rel > 1e-9
            # the stored running total is a float; its delta can only carry the
            # new sweep's area to within one unit in the last place of the total
            within_rounding &= mismatch <= math.ulp(b)
    ok = strict and worst <= 1e-9
    record("5", ok, f"{runs} runs, {steps} steps, strictly increasing={strict}; {over} deltas off by more than "
                    f"1e-9 relative (max {worst:.2e}), all mismatches within one ulp of the running "
                    f"total={within_rounding}")
    assert strict and within_rounding
    assert ok


def test_criterion_06_policy_invariance(named_runs, polygon_policy_runs):
    pairs = failures = 0
    names = sorted({name for name, _ in named_runs})
    for name in names:
        base = named_runs[(name, Order.LARGEST_FIRST)]
        for order in (Order.FIFO, Order.LIFO):
            pairs += 1
            failures += not sweeps_equivalent(base, named_runs[(name, order)])
    base = polygon_policy_runs[Order.LARGEST_FIRST]
    for order in (Order.FIFO, Order.LIFO):
        for a, b in zip(base, polygon_policy_runs[order]):
            pairs += 1
            failures += not sweeps_equivalent(a, b)
    ok = failures == 0
    record("6", ok, f"{pairs} policy pairs compared (FIFO, LIFO vs LargestFirst), {failures} not equivalent")
    assert ok


def test_criterion_07_boundary_validity(polygons):
    checks = failures = 0
    worst_gap = 0.0

    def observer(state, node):
        nonlocal checks, failures, worst_gap
        d = validate_boundary(state.frontier)
        checks += 1
        failures += not d.ok
        worst_gap = max(worst_gap, d.closure_gap / d.tolerance)

    for name in list(NAMED_CURVES) + [f"koch{k}" for k in KOCH_LEVELS]:
        for order in POLICIES if not name.startswith("koch4") else (Order.LARGEST_FIRST,):
            run_sweep(named_curve(name), None, EnginePolicy(order=order), observer)
    for c in polygons:
        for order in POLICIES:
            run_sweep(c, None, EnginePolicy(order=order), observer)
    ok = failures == 0
    record("7", ok, f"{checks} boundaries validated after every splice, {failures} failures, "
                    f"worst closure gap {worst_gap:.2f} x eps")
    assert ok


def test_criterion_08_connectivity(named_runs, polygon_runs, polygons):
    rng = np.random.default_rng(808)
    targets = [(named_runs[(n, Order.LARGEST_FIRST)], named_curve(n).eps) for n in sorted({n for n, _ in named_runs})]
    targets += [(s, c.eps) for s, c in zip(polygon_runs[0], polygons)]
    paths = not_interior = no_path = 0
    max_turns = 0
    for s, _ in targets:
        c = s.curve
        spacing = 1e-4 * c.bbox.diagonal
        pts = interior_samples(c, 200, rng, collar=1e-6 * c.bbox.diagonal)
        for q1, q2 in zip(pts[0::2], pts[1::2]):
            paths += 1
            try:
                p = connectivity_path(s, q1, q2)
            except NoPath:
                no_path += 1
                continue
            max_turns = max(max_turns, p.turns)
            not_interior += not path_is_interior(s, p, spacing)
    ok = no_path == 0 and not_interior == 0
    record("8", ok, f"{paths} paths over {len(targets)} curves, {no_path} NoPath, {not_interior} with a "
                    f"non-interior sample, max turns {max_turns}")
    assert ok


def test_criterion_09_exterior(polygon_runs, polygons):
    rng = np.random.default_rng(909)
    per_polygon = []
    outside_total = outside_ok = 0
    for s, c in zip(polygon_runs[0], polygons):
        ext = exterior_sweep(c, s.root_point)
        pts = np.empty((0, 2))
        while len(pts) < 100:
            cand = uniform_in_box(c, 400, rng)
            inside, on = raycast_inside(c.vertices, cand)
            pts = np.vstack([pts, cand[~inside & ~on & (c.distance(cand) > c.eps)]])
        pts = pts[:100]
        confirmed = exterior_membership(ext, pts)
        verdicts = classify_points(build_index(s), c, pts, ext)
        agree = confirmed & np.array([r.verdict is Verdict.EXTERIOR for r in verdicts])
        per_polygon.append(agree.mean())
        bb = c.bbox
        ang = rng.random(100) * 2 * math.pi
        rad = bb.diagonal * (0.75 + 5 * rng.random(100))
        centre = np.array([(bb.min.x + bb.max.x) / 2, (bb.min.y + bb.max.y) / 2])
        far = centre + rad[:, None] * np.column_stack([np.cos(ang), np.sin(ang)])
        far_ok = exterior_membership(ext, far) & np.array(
            [r.verdict is Verdict.EXTERIOR for r in classify_points(build_index(s), c, far, ext)])
        outside_total += len(far)
        outside_ok += int(far_ok.sum())
    worst = min(per_polygon)
    overall = float(np.mean(per_polygon))
    ok = worst >= 0.99 and outside_ok == outside_total
    record("9", ok, f"inverted-sweep agreement on in-box exterior samples: worst polygon {100 * worst:.1f}%, "
                    f"overall {100 * overall:.3f}% (>= 99%); outside bbox {outside_ok}/{outside_total} (100%)")
    assert ok


def test_criterion_10_ray_guard(named_runs, polygon_policy_runs):
    s = run_sweep(ClosedPolyline(SQUARE), None, EnginePolicy(order=Order.LIFO, cap_fraction=0.5))
    suspicions = [d for d in s.ray_diagnostics if d.verdict is RayVerdict.NON_TERMINATING_SUSPECTED]
    first = max(suspicions[0].chain) if suspicions else None
    area_ok = abs(s.total_area - 1.0) <= 1e-9 and s.maximal
    standard = sum(len(r.ray_diagnostics) for r in _all_runs(named_runs, polygon_policy_runs))
    ok = first is not None and first <= 64 and area_ok and standard == 0
    record("10", ok, f"capped rectangle: suspicion at step {first} (<= 64), final area {s.total_area:.12f}; "
                     f"standard policies: {standard} suspicions")
    assert ok


def test_criterion_11_open_segments(polygons):
    rng = np.random.default_rng(1111)
    queries = mismatches = 0
    while queries < 10**4:
        for c in polygons:
            for q in uniform_in_box(c, 50, rng, pad=0.05):
                if c.distance([q])[0] <= 10 * c.eps:
                    continue
                s = open_segment_at(c, q)
                o = brute_force_open_segment(c.vertices, q)
                queries += 1
                for a, b in ((s.y_low, o.y_low), (s.y_high, o.y_high)):
                    if not (a == b or abs(a - b) <= c.eps):
                        mismatches += 1
                        break
            if queries >= 10**4:
                break
    ok = mismatches == 0
    record("11", ok, f"{queries} open-segment queries, {mismatches} mismatches beyond eps")
    assert ok
