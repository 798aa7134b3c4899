"""Brute-force reference implementations for checking the sweep machinery.

Everything here is written directly against vertex arrays with numpy and
does not reuse the package's curve, sweep or classification code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import PointOnCurve


@dataclass(frozen=True)
class OracleVerdict:
    inside: bool
    on_boundary: bool


class OracleSegment(NamedTuple):
    x: float
    y_low: float
    y_high: float


class SimplicityReport(NamedTuple):
    simple: bool
    violation: tuple[int, int] | None


def _poly(poly) -> np.ndarray:
    v = np.asarray(poly, dtype=float).reshape(-1, 2)
    if len(v) > 1 and np.array_equal(v[0], v[-1]):
        v = v[:-1]
    return v


def _default_tol(v: np.ndarray) -> float:
    span = v.max(axis=0) - v.min(axis=0)
    return 1e-9 * float(math.hypot(*span))


def shoelace_area(poly) -> float:
    """Absolute polygon area from the trapezoid (shoelace) formula."""
    v = _poly(poly)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(math.fsum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _seg_point_dist(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(ll > 0, ((px - ax) * dx + (py - ay) * dy) / np.where(ll > 0, ll, 1), 0.0)
    s = np.clip(s, 0.0, 1.0)
    return np.hypot(px - (ax + s * dx), py - (ay + s * dy))


def _boundary_distance(v: np.ndarray, q: np.ndarray) -> np.ndarray:
    a = v
    b = np.roll(v, -1, axis=0)
    d = _seg_point_dist(q[:, 0:1], q[:, 1:2], a[None, :, 0], a[None, :, 1], b[None, :, 0], b[None, :, 1])
    return d.min(axis=1)


def raycast_inside(poly, points, tol: float | None = None, chunk: int = 2048) -> tuple[np.ndarray, np.ndarray]:
    """Even-odd rule for many points; returns ``(inside, on_boundary)`` arrays.

    The ray starts in a fixed irrational direction; a point whose ray passes
    within tolerance of a vertex is retried with a rotated direction.
    """
    v = _poly(poly)
    if tol is None:
        tol = _default_tol(v)
    q_all = np.asarray(points, dtype=float).reshape(-1, 2)
    inside = np.zeros(len(q_all), dtype=bool)
    on = np.zeros(len(q_all), dtype=bool)
    for s in range(0, len(q_all), chunk):
        q = q_all[s:s + chunk]
        on_c = _boundary_distance(v, q) <= tol
        ins = np.zeros(len(q), dtype=bool)
        todo = np.flatnonzero(~on_c)
        angle = 0.1234567
        for _attempt in range(16):
            if todo.size == 0:
                break
            c, sn = math.cos(angle), math.sin(angle)
            # rotate so that the ray points along +x
            rx = v[:, 0] * c + v[:, 1] * sn
            ry = -v[:, 0] * sn + v[:, 1] * c
            qx = q[todo, 0] * c + q[todo, 1] * sn
            qy = -q[todo, 0] * sn + q[todo, 1] * c
            ax, ay = rx[None, :], ry[None, :]
            bx, by = np.roll(rx, -1)[None, :], np.roll(ry, -1)[None, :]
            vert_hit = ((np.abs(ay - qy[:, None]) <= tol) & (ax > qx[:, None] - tol)).any(axis=1)
            straddle = (ay > qy[:, None]) != (by > qy[:, None])
            with np.errstate(invalid="ignore", divide="ignore"):
                xi = ax + (qy[:, None] - ay) * (bx - ax) / (by - ay)
            crossings = (straddle & (xi > qx[:, None])).sum(axis=1)
            ok = ~vert_hit
            ins[todo[ok]] = crossings[ok] % 2 == 1
            todo = todo[~ok]
            angle += 0.7853981
        inside[s:s + chunk] = ins
        on[s:s + chunk] = on_c
    return inside, on


def raycast_point_in_polygon(poly, q: Sequence[float], tol: float | None = None) -> OracleVerdict:
    inside, on = raycast_inside(poly, [q], tol)
    return OracleVerdict(bool(inside[0]), bool(on[0]))


def _segment_distance_matrix(a0, a1, b0, b1) -> np.ndarray:
    def cross(o, p, r):
        return (p[..., 0] - o[..., 0]) * (r[..., 1] - o[..., 1]) - (p[..., 1] - o[..., 1]) * (r[..., 0] - o[..., 0])

    d1, d2 = cross(b0, b1, a0), cross(b0, b1, a1)
    d3, d4 = cross(a0, a1, b0), cross(a0, a1, b1)
    # cross products at rounding level carry no sign information (collinear
    # segments); those cases are decided by the endpoint distances below
    la = np.hypot(*(a1 - a0).T).T
    lb = np.hypot(*(b1 - b0).T).T
    noise = 1e-12 * la * lb
    sa1, sa2 = np.where(np.abs(d1) > noise, np.sign(d1), 0), np.where(np.abs(d2) > noise, np.sign(d2), 0)
    sb1, sb2 = np.where(np.abs(d3) > noise, np.sign(d3), 0), np.where(np.abs(d4) > noise, np.sign(d4), 0)
    proper = (sa1 * sa2 < 0) & (sb1 * sb2 < 0)
    dist = np.minimum.reduce([
        _seg_point_dist(a0[..., 0], a0[..., 1], b0[..., 0], b0[..., 1], b1[..., 0], b1[..., 1]),
        _seg_point_dist(a1[..., 0], a1[..., 1], b0[..., 0], b0[..., 1], b1[..., 0], b1[..., 1]),
        _seg_point_dist(b0[..., 0], b0[..., 1], a0[..., 0], a0[..., 1], a1[..., 0], a1[..., 1]),
        _seg_point_dist(b1[..., 0], b1[..., 1], a0[..., 0], a0[..., 1], a1[..., 0], a1[..., 1]),
    ])
    return np.where(proper, 0.0, dist)


def simplicity_check(poly, tol: float | None = None, chunk: int = 512) -> SimplicityReport:
    """Quadratic test of every pair of non-adjacent edges."""
    v = _poly(poly)
    n = len(v)
    if n < 3:
        return SimplicityReport(False, None)
    if tol is None:
        tol = _default_tol(v)
    a = v
    b = np.roll(v, -1, axis=0)
    lengths = np.hypot(*(b - a).T)
    if np.any(lengths <= tol):
        i = int(np.argmax(lengths <= tol))
        return SimplicityReport(False, (i, i))
    for s in range(0, n, chunk):
        i = np.arange(s, min(n, s + chunk))[:, None]
        j = np.arange(n)[None, :]
        d = _segment_distance_matrix(a[i], b[i], a[j], b[j])
        adjacent = (j <= i + 1) | ((i == 0) & (j == n - 1))
        bad = (d <= tol) & ~adjacent
        if bad.any():
            r, c = np.argwhere(bad)[0]
            return SimplicityReport(False, (int(i[r, 0]), int(j[0, c])))
    return SimplicityReport(True, None)


def brute_force_open_segment(poly, p: Sequence[float], tol: float | None = None) -> OracleSegment:
    """Maximal vertical free segment through ``p`` from a scan of every edge."""
    v = _poly(poly)
    if tol is None:
        tol = _default_tol(v)
    px, py = float(p[0]), float(p[1])
    below, above = -math.inf, math.inf
    n = len(v)
    for i in range(n):
        (ax, ay), (bx, by) = v[i], v[(i + 1) % n]
        if max(ax, bx) < px - tol or min(ax, bx) > px + tol:
            continue
        if abs(bx - ax) <= tol:
            lo, hi = min(ay, by), max(ay, by)
        else:
            s = min(1.0, max(0.0, (px - ax) / (bx - ax)))
            lo = hi = ay + s * (by - ay)
        if lo - tol <= py <= hi + tol:
            raise PointOnCurve(f"point {px, py} lies on edge {i}")
        if hi < py:
            below = max(below, hi)
        elif lo > py:
            above = min(above, lo)
    return OracleSegment(px, below, above)


def monte_carlo_area(poly, samples: int = 10**6, seed: int = 0) -> tuple[float, float]:
    """Area estimate from uniform samples in the bounding box, with its standard error."""
    v = _poly(poly)
    lo, hi = v.min(axis=0), v.max(axis=0)
    rng = np.random.default_rng(seed)
    pts = lo + (hi - lo) * rng.random((samples, 2))
    inside, _ = raycast_inside(v, pts, tol=0.0)
    box = float(np.prod(hi - lo))
    frac = inside.mean()
    return box * frac, box * math.sqrt(frac * (1 - frac) / samples)


def koch_area_recurrence(level: int, side: float = 1.0) -> float:
    """Koch snowflake area by adding the triangles of each refinement level."""
    area = math.sqrt(3) / 4 * side**2
    edges, s = 3, side
    for _ in range(level):
        s /= 3
        area += edges * (math.sqrt(3) / 4 * s**2)
        edges *= 4
    return area


def random_simple_polygon(rng: np.random.Generator, n_min: int = 4, n_max: int = 24,
                          clearance: float = 1e-3, max_tries: int = 1000) -> np.ndarray:
    """Star-shaped polygon with random angles and radii, rejected until simple.

    Candidates whose non-adjacent edges come closer than ``clearance``
    (relative to the bounding-box diagonal) are rejected too, so the result
    is comfortably away from degeneracy.
    """
    for _ in range(max_tries):
        n = int(rng.integers(n_min, n_max + 1))
        ang = np.sort(rng.random(n) * 2 * math.pi)
        if np.min(np.diff(np.r_[ang, ang[0] + 2 * math.pi])) < 0.02:
            continue
        r = 0.2 + rng.random(n)
        v = np.column_stack([r * np.cos(ang), r * np.sin(ang)])
        v += rng.normal(scale=0.05, size=v.shape)
        diag = float(math.hypot(*(v.max(axis=0) - v.min(axis=0))))
        if simplicity_check(v, tol=clearance * diag).simple:
            return v
    raise RuntimeError("could not generate a simple polygon")
