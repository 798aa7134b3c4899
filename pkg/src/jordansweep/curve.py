"""Closed polylines, curve generators and axis-parallel line queries.

Every other module consumes a :class:`ClosedPolyline`.  Vertices are kept
counterclockwise, coordinates are plain floats and all coincidence decisions
use the curve's own tolerance ``eps`` (``1e-9`` times the bounding-box
diagonal).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping, NamedTuple, Sequence, Union

import numpy as np

from .errors import (
    DegenerateEdge,
    LevelTooLarge,
    NonSimpleCurve,
    TooFewVertices,
)

EPS_REL = 1e-9
KOCH_EDGE_CAP = 10**6
DEGENERACY_STEP = 1e-3
DEGENERACY_CLEARANCE = 1e-6


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class BoundingBox:
    min: Point2
    max: Point2

    @property
    def width(self) -> float:
        return self.max.x - self.min.x

    @property
    def height(self) -> float:
        return self.max.y - self.min.y

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    def contains(self, x: float, y: float) -> bool:
        return self.min.x <= x <= self.max.x and self.min.y <= y <= self.max.y

    def expanded(self, margin: float) -> "BoundingBox":
        return BoundingBox(
            Point2(self.min.x - margin, self.min.y - margin),
            Point2(self.max.x + margin, self.max.y + margin),
        )


class HitKind(enum.Enum):
    CROSSING = "crossing"
    TOUCH = "touch"
    EDGE_OVERLAP = "edge_overlap"


class Hit(NamedTuple):
    """One intersection of an axis-parallel line with the curve.

    ``lo``/``hi`` are coordinates *along* the line (y for a vertical line,
    x for a horizontal one); they coincide for point hits.  ``crossing``
    records whether the curve passes from one side of the line to the other,
    which stays meaningful for overlap intervals too.
    """

    lo: float
    hi: float
    kind: HitKind
    edges: tuple[int, ...]
    crossing: bool


@dataclass(frozen=True)
class VerticalHits:
    x: float
    hits: tuple[Hit, ...]

    def free_intervals(self, lo: float, hi: float, min_length: float = 0.0) -> list[tuple[float, float]]:
        return _subtract_hits(self.hits, lo, hi, min_length)


@dataclass(frozen=True)
class HorizontalHits:
    y: float
    hits: tuple[Hit, ...]

    def free_intervals(self, lo: float, hi: float, min_length: float = 0.0) -> list[tuple[float, float]]:
        return _subtract_hits(self.hits, lo, hi, min_length)


def _subtract_hits(hits: Sequence[Hit], lo: float, hi: float, min_length: float) -> list[tuple[float, float]]:
    """Open sub-intervals of ``(lo, hi)`` that contain no hit."""
    out = []
    start = lo
    for h in hits:
        if h.hi <= lo or h.lo >= hi:
            continue
        if h.lo - start > min_length:
            out.append((start, h.lo))
        start = max(start, h.hi)
    if hi - start > min_length:
        out.append((start, hi))
    return out


class _AxisBuckets:
    """Uniform bucket index over 1-D intervals (one per edge)."""

    def __init__(self, lo: np.ndarray, hi: np.ndarray, nbins: int):
        self.lo = lo
        self.hi = hi
        self.r0 = float(lo.min())
        span = float(hi.max()) - self.r0
        self.nbins = nbins
        self.w = span / nbins if span > 0 else 1.0
        b0 = self._bin(lo)
        b1 = self._bin(hi)
        counts = b1 - b0 + 1
        total = int(counts.sum())
        ids = np.repeat(np.arange(lo.size), counts)
        starts = np.cumsum(counts) - counts
        bins = np.repeat(b0, counts) + (np.arange(total) - np.repeat(starts, counts))
        order = np.argsort(bins, kind="stable")
        self.ids = ids[order]
        self.indptr = np.concatenate([[0], np.cumsum(np.bincount(bins, minlength=nbins))])

    def _bin(self, v):
        b = np.floor((np.asarray(v) - self.r0) / self.w).astype(np.int64)
        return np.clip(b, 0, self.nbins - 1)

    def _bin1(self, v: float) -> int:
        if not math.isfinite(v):
            return 0 if v < 0 else self.nbins - 1
        b = int(math.floor((v - self.r0) / self.w))
        return 0 if b < 0 else (self.nbins - 1 if b >= self.nbins else b)

    def query(self, a: float, b: float) -> np.ndarray:
        """Ids of intervals that intersect the closed range [a, b]."""
        b0 = self._bin1(a)
        b1 = self._bin1(b)
        ids = self.ids[self.indptr[b0]:self.indptr[b1 + 1]]
        if b1 > b0:
            ids = np.unique(ids)
        return ids[(self.lo[ids] <= b) & (self.hi[ids] >= a)]


class ClosedPolyline:
    """A simple closed polyline, the concrete Jordan curve.

    The vertex loop is implicitly closed.  Construction normalizes the
    orientation to counterclockwise and, unless ``check=False``, rejects
    self-intersecting input.
    """

    def __init__(self, vertices: Any, *, check: bool = True):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError("vertices must be an (n, 2) array")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertex coordinates must be finite")
        if len(v) >= 2 and np.array_equal(v[0], v[-1]):
            v = v[:-1]
        if len(v) < 3:
            raise TooFewVertices(f"need at least 3 vertices, got {len(v)}")
        seg = np.roll(v, -1, axis=0) - v
        zero = np.flatnonzero(np.hypot(seg[:, 0], seg[:, 1]) == 0.0)
        if zero.size:
            raise DegenerateEdge(f"edge {int(zero[0])} has zero length")
        if _signed_area(v) < 0:
            v = v[::-1].copy()
        v.setflags(write=False)
        self._v = v
        self.simplicity_checked = False
        if check:
            bad = polyline_self_intersections(v, self.eps, closed=True, first_only=True)
            if bad:
                i, j = bad[0]
                raise NonSimpleCurve(i, j)
            self.simplicity_checked = True

    def __len__(self) -> int:
        return len(self._v)

    def __repr__(self) -> str:
        return f"ClosedPolyline(n={len(self)}, bbox={tuple(self.bbox.min)}..{tuple(self.bbox.max)})"

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Edge endpoint columns ``(x0, y0, x1, y1)``; edge i runs v[i] -> v[i+1]."""
        v = self._v
        w = np.roll(v, -1, axis=0)
        return v[:, 0], v[:, 1], w[:, 0], w[:, 1]

    @cached_property
    def _columns(self) -> tuple[list[float], list[float]]:
        return self._v[:, 0].tolist(), self._v[:, 1].tolist()

    @cached_property
    def bbox(self) -> BoundingBox:
        lo = self._v.min(axis=0)
        hi = self._v.max(axis=0)
        return BoundingBox(Point2(float(lo[0]), float(lo[1])), Point2(float(hi[0]), float(hi[1])))

    @cached_property
    def eps(self) -> float:
        return EPS_REL * self.bbox.diagonal

    @property
    def signed_area(self) -> float:
        return _signed_area(self._v)

    @property
    def perimeter(self) -> float:
        x0, y0, x1, y1 = self.edges
        return float(np.hypot(x1 - x0, y1 - y0).sum())

    @cached_property
    def x_index(self) -> _AxisBuckets:
        x0, _, x1, _ = self.edges
        return _AxisBuckets(np.minimum(x0, x1), np.maximum(x0, x1), max(1, len(self) // 2))

    @cached_property
    def y_index(self) -> _AxisBuckets:
        _, y0, _, y1 = self.edges
        return _AxisBuckets(np.minimum(y0, y1), np.maximum(y0, y1), max(1, len(self) // 2))

    @cached_property
    def _edge_samples(self):
        """KD-tree over points spread along every edge, their owning edges and
        the largest distance from any curve point to its nearest sample."""
        from scipy.spatial import cKDTree

        a = self._v
        b = np.roll(a, -1, axis=0)
        lengths = np.hypot(*(b - a).T)
        step = max(float(np.median(lengths)), float(lengths.sum()) / (4 * len(a)))
        pieces = np.maximum(1, np.ceil(lengths / step)).astype(np.int64)
        owner = np.repeat(np.arange(len(a)), pieces)
        k = np.arange(len(owner)) - np.repeat(np.cumsum(pieces) - pieces, pieces)
        t = (k + 0.5) / pieces[owner]
        samples = a[owner] + t[:, None] * (b - a)[owner]
        reach = float(np.max(lengths / pieces)) / 2
        return cKDTree(samples), owner, reach

    def distance(self, points: Any) -> np.ndarray:
        """Euclidean distance from each point to the curve.

        The nearest edge sample bounds the distance from above; every edge
        that could be closer has a sample within that bound plus the sample
        reach, and those candidates are measured exactly.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float)).reshape(-1, 2)
        if len(pts) == 0:
            return np.empty(0)
        tree, owner, reach = self._edge_samples
        bound, _ = tree.query(pts)
        groups = tree.query_ball_point(pts, bound + reach * (1 + 1e-9) + 1e-300)
        counts = np.fromiter((len(g) for g in groups), dtype=np.int64, count=len(pts))
        cand = owner[np.fromiter((i for g in groups for i in g), dtype=np.int64, count=int(counts.sum()))]
        who = np.repeat(np.arange(len(pts)), counts)
        a = self._v[cand]
        b = self._v[(cand + 1) % len(self._v)]
        d = _point_segment_distance(pts[who, 0], pts[who, 1], a[:, 0], a[:, 1], b[:, 0], b[:, 1])
        out = np.minimum(bound, np.inf)
        np.minimum.at(out, who, d)
        return out

    def to_json(self) -> dict:
        return {"type": "polyline", "vertices": self._v.tolist()}


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


# ---------------------------------------------------------------------------
# Generators and loading
# ---------------------------------------------------------------------------

UNIT_TRIANGLE = ((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0))

CurveSpec = Union[Mapping[str, Any], "ClosedPolyline"]


def koch_generate(level: int, base: Sequence[Sequence[float]] = UNIT_TRIANGLE, *,
                  cap: int = KOCH_EDGE_CAP) -> ClosedPolyline:
    """Outward Koch snowflake polygon after ``level`` refinements of ``base``."""
    if level < 0:
        raise ValueError("level must be >= 0")
    if 3 * 4**level > cap:
        raise LevelTooLarge(f"level {level} gives {3 * 4**level} edges (cap {cap})")
    pts = np.asarray(base, dtype=float)
    if pts.shape != (3, 2):
        raise ValueError("base must be a triangle")
    if _signed_area(pts) < 0:
        pts = pts[::-1].copy()
    c, s = 0.5, math.sqrt(3.0) / 2.0
    for _ in range(level):
        d = (np.roll(pts, -1, axis=0) - pts) / 3.0
        a = pts + d
        # clockwise turn by 60 degrees points outward for a counterclockwise loop
        peak = a + np.column_stack([c * d[:, 0] + s * d[:, 1], -s * d[:, 0] + c * d[:, 1]])
        pts = np.stack([pts, a, peak, pts + 2.0 * d], axis=1).reshape(-1, 2)
    return ClosedPolyline(pts)


def regular_ngon(n: int, radius: float = 1.0, center: Sequence[float] = (0.0, 0.0)) -> ClosedPolyline:
    if n < 3:
        raise TooFewVertices("a regular polygon needs n >= 3")
    if radius <= 0:
        raise ValueError("radius must be positive")
    ang = 2.0 * np.pi * np.arange(n) / n
    cx, cy = center
    return ClosedPolyline(np.column_stack([cx + radius * np.cos(ang), cy + radius * np.sin(ang)]))


def load_curve(spec: CurveSpec) -> ClosedPolyline:
    """Build a validated curve from a JSON-style mapping.

    Accepted forms::

        {"type": "polyline", "vertices": [[x, y], ...]}
        {"type": "koch", "level": k}
        {"type": "regular", "n": m, "radius": r, "center": [x, y]}
    """
    if isinstance(spec, ClosedPolyline):
        return spec
    kind = spec.get("type")
    if kind == "polyline":
        return ClosedPolyline(spec["vertices"])
    if kind == "koch":
        base = spec.get("base", UNIT_TRIANGLE)
        return koch_generate(int(spec["level"]), base)
    if kind == "regular":
        return regular_ngon(int(spec["n"]), float(spec.get("radius", 1.0)), spec.get("center", (0.0, 0.0)))
    raise ValueError(f"unknown curve type {kind!r}")


def read_curve(path: str | Path) -> ClosedPolyline:
    with open(path) as fh:
        return load_curve(json.load(fh))


def _vertical_clearance(v: np.ndarray, theta: float) -> float:
    x0, y0 = v[:, 0], v[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    phi = np.arctan2(y1 - y0, x1 - x0) - theta
    psi = np.mod(phi - np.pi / 2, np.pi)
    return float(np.minimum(psi, np.pi - psi).min())


def remove_degeneracy(curve: ClosedPolyline, step: float = DEGENERACY_STEP,
                      clearance: float = DEGENERACY_CLEARANCE) -> tuple[ClosedPolyline, float]:
    """Rotate the curve clockwise about the origin so no edge is vertical.

    The angle is the smallest multiple of ``step`` that leaves every edge
    direction at least ``clearance`` radians away from vertical.
    """
    v = curve.vertices
    k = 0
    while _vertical_clearance(v, k * step) < clearance:
        k += 1
        if k * step > math.pi:  # pragma: no cover - finite direction sets always admit an angle
            raise RuntimeError("no admissible rotation angle")
    theta = k * step
    if k == 0:
        return curve, 0.0
    c, s = math.cos(theta), math.sin(theta)
    rotated = np.column_stack([c * v[:, 0] + s * v[:, 1], -s * v[:, 0] + c * v[:, 1]])
    out = ClosedPolyline(rotated, check=False)
    out.simplicity_checked = curve.simplicity_checked
    return out, theta


# ---------------------------------------------------------------------------
# Axis-parallel line queries
# ---------------------------------------------------------------------------

def _line_hits(curve: ClosedPolyline, axis: int, value: float, tol: float | None = None,
               lo: float = -math.inf, hi: float = math.inf) -> tuple[Hit, ...]:
    """Hits of the line ``coord[axis] == value`` with the curve, sorted along the line.

    With a finite ``lo``/``hi`` only edges reaching that stretch of the line
    are examined; hits are then exact inside the range, while overlap runs
    that leave it may be clipped and their ``crossing`` flag is unreliable.
    """
    if tol is None:
        tol = curve.eps
    n = len(curve)
    cols = curve._columns
    u, w = cols[axis], cols[1 - axis]
    index = curve.x_index if axis == 0 else curve.y_index
    cand = index.query(value - tol, value + tol)
    if lo > -math.inf or hi < math.inf:
        other = curve.y_index if axis == 0 else curve.x_index
        cand = cand[(other.lo[cand] <= hi + tol) & (other.hi[cand] >= lo - tol)]
    cand = cand.tolist()
    if not cand:
        return ()
    records: list[Hit] = []
    on: set[int] = set()
    for i in cand:
        j = i + 1 if i + 1 < n else 0
        du_i = u[i] - value
        du_j = u[j] - value
        on_i = abs(du_i) <= tol
        on_j = abs(du_j) <= tol
        if on_i:
            on.add(i)
        if on_j:
            on.add(j)
        if not on_i and not on_j and du_i * du_j < 0:
            t = (value - u[i]) / (u[j] - u[i])
            y = w[i] + t * (w[j] - w[i])
            records.append(Hit(y, y, HitKind.CROSSING, (i,), True))
    if on:
        for run in _cyclic_runs(sorted(on), n):
            ws = [w[k] for k in run]
            lo, hi = min(ws), max(ws)
            prev = (run[0] - 1) % n
            nxt = (run[-1] + 1) % n
            crosses = (u[prev] > value) != (u[nxt] > value)
            if hi - lo > tol:
                kind = HitKind.EDGE_OVERLAP
            else:
                kind = HitKind.CROSSING if crosses else HitKind.TOUCH
            edges = tuple(e % n for e in range(run[0] - 1, run[0] + len(run)))
            records.append(Hit(lo, hi, kind, edges, crosses))
    records.sort(key=lambda h: (h.lo, h.hi))
    return _coalesce(records, tol)


def _cyclic_runs(ids: list[int], n: int) -> list[list[int]]:
    runs: list[list[int]] = [[ids[0]]]
    for a in ids[1:]:
        if a == runs[-1][-1] + 1:
            runs[-1].append(a)
        else:
            runs.append([a])
    if len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == n - 1:
        runs[0] = runs.pop() + runs[0]
    return runs


def _coalesce(records: list[Hit], tol: float) -> tuple[Hit, ...]:
    out: list[Hit] = []
    for h in records:
        if out and h.lo <= out[-1].hi + tol:
            prev = out[-1]
            lo, hi = min(prev.lo, h.lo), max(prev.hi, h.hi)
            if hi - lo > tol:
                kind = HitKind.EDGE_OVERLAP
            elif HitKind.CROSSING in (prev.kind, h.kind):
                kind = HitKind.CROSSING
            else:
                kind = HitKind.TOUCH
            # two coincident hits on a simple curve means the line passes a shared vertex twice
            out[-1] = Hit(lo, hi, kind, tuple(sorted(set(prev.edges + h.edges))), prev.crossing != h.crossing)
        else:
            out.append(h)
    return tuple(out)


def vertical_line_hits(curve: ClosedPolyline, x: float, lo: float = -math.inf,
                       hi: float = math.inf) -> VerticalHits:
    """Intersections of the vertical line at ``x`` with the curve, optionally limited to y in [lo, hi]."""
    return VerticalHits(float(x), _line_hits(curve, 0, float(x), None, lo, hi))


def horizontal_line_hits(curve: ClosedPolyline, y: float, lo: float = -math.inf,
                         hi: float = math.inf) -> HorizontalHits:
    """Intersections of the horizontal line at ``y`` with the curve, optionally limited to x in [lo, hi]."""
    return HorizontalHits(float(y), _line_hits(curve, 1, float(y), None, lo, hi))


# ---------------------------------------------------------------------------
# Segment intersection (grid accelerated)
# ---------------------------------------------------------------------------

def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _point_segment_distance(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    den = dx * dx + dy * dy
    safe = np.where(den > 0, den, 1.0)
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / safe, 0.0, 1.0)
    t = np.where(den > 0, t, 0.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def segment_distances(a0: np.ndarray, a1: np.ndarray, b0: np.ndarray, b1: np.ndarray) -> np.ndarray:
    """Pairwise distance between segments ``a0-a1`` and ``b0-b1`` (row-aligned)."""
    d1 = _cross(b0[:, 0], b0[:, 1], b1[:, 0], b1[:, 1], a0[:, 0], a0[:, 1])
    d2 = _cross(b0[:, 0], b0[:, 1], b1[:, 0], b1[:, 1], a1[:, 0], a1[:, 1])
    d3 = _cross(a0[:, 0], a0[:, 1], a1[:, 0], a1[:, 1], b0[:, 0], b0[:, 1])
    d4 = _cross(a0[:, 0], a0[:, 1], a1[:, 0], a1[:, 1], b1[:, 0], b1[:, 1])
    # signs of rounding-level cross products (collinear pairs) are meaningless;
    # those pairs are decided by the endpoint distances
    noise = 1e-12 * np.hypot(*(a1 - a0).T) * np.hypot(*(b1 - b0).T)
    d1, d2, d3, d4 = (np.where(np.abs(d) > noise, d, 0.0) for d in (d1, d2, d3, d4))
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    dist = np.minimum.reduce([
        _point_segment_distance(a0[:, 0], a0[:, 1], b0[:, 0], b0[:, 1], b1[:, 0], b1[:, 1]),
        _point_segment_distance(a1[:, 0], a1[:, 1], b0[:, 0], b0[:, 1], b1[:, 0], b1[:, 1]),
        _point_segment_distance(b0[:, 0], b0[:, 1], a0[:, 0], a0[:, 1], a1[:, 0], a1[:, 1]),
        _point_segment_distance(b1[:, 0], b1[:, 1], a0[:, 0], a0[:, 1], a1[:, 0], a1[:, 1]),
    ])
    return np.where(proper, 0.0, dist)


def _candidate_pairs(p0: np.ndarray, p1: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    m = len(p0)
    lo = np.minimum(p0, p1) - tol
    hi = np.maximum(p0, p1) + tol
    span = hi.max(axis=0) - lo.min(axis=0)
    diag = float(np.hypot(*span)) or 1.0
    lengths = np.hypot(*(p1 - p0).T)
    h = max(float(np.median(lengths)), diag / math.sqrt(m), diag * 1e-6)
    origin = lo.min(axis=0)
    c0 = np.floor((lo - origin) / h).astype(np.int64)
    c1 = np.floor((hi - origin) / h).astype(np.int64)
    nx = int(c1[:, 0].max()) + 1
    cx = c1[:, 0] - c0[:, 0] + 1
    cy = c1[:, 1] - c0[:, 1] + 1
    counts = cx * cy
    total = int(counts.sum())
    seg = np.repeat(np.arange(m), counts)
    k = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    gx = np.repeat(c0[:, 0], counts) + k % np.repeat(cx, counts)
    gy = np.repeat(c0[:, 1], counts) + k // np.repeat(cx, counts)
    cell = gy * nx + gx
    order = np.lexsort((seg, cell))
    cell, seg = cell[order], seg[order]
    starts = np.flatnonzero(np.r_[True, cell[1:] != cell[:-1]])
    ends = np.r_[starts[1:], total]
    run_end = np.repeat(ends, ends - starts)
    partners = run_end - np.arange(total) - 1
    npairs = int(partners.sum())
    if npairs == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    first = np.repeat(np.arange(total), partners)
    rank = np.arange(npairs) - np.repeat(np.cumsum(partners) - partners, partners)
    a = seg[first]
    b = seg[first + 1 + rank]
    i = np.minimum(a, b)
    j = np.maximum(a, b)
    keys = np.unique(i * m + j)
    return keys // m, keys % m


def polyline_self_intersections(points: np.ndarray, tol: float, *, closed: bool = True,
                                first_only: bool = False) -> list[tuple[int, int]]:
    """Pairs of non-adjacent segments closer than ``tol``.

    Segment i joins ``points[i]`` and ``points[i+1]`` (cyclically when
    ``closed``).  Candidate pairs come from a uniform grid over segment
    bounding boxes, so typical inputs cost close to linear time.
    """
    pts = np.asarray(points, dtype=float)
    m = len(pts) if closed else len(pts) - 1
    if m < 3:
        return []
    p0 = pts[:m]
    p1 = np.roll(pts, -1, axis=0)[:m] if closed else pts[1:]
    i, j = _candidate_pairs(p0, p1, tol)
    adjacent = (j - i == 1) | (closed & (i == 0) & (j == m - 1)) | (i == j)
    i, j = i[~adjacent], j[~adjacent]
    if i.size == 0:
        return []
    d = segment_distances(p0[i], p1[i], p0[j], p1[j])
    bad = np.flatnonzero(d <= tol)
    if first_only:
        bad = bad[:1]
    return [(int(i[k]), int(j[k])) for k in bad]
