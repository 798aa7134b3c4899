"""Horizontal sweeps: profiles, jumps, trapezoids and the sweep boundary.

A horizontal sweep over a free segment ``t`` is the union of the maximal
vertical free chords through the interior points of ``t``.  For a polyline
the chord end-points trace piecewise-linear upper and lower profiles whose
breakpoints sit at vertex x-coordinates; the region between them is a finite
union of trapezoids.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import NamedTuple, Union

import numpy as np

from .curve import ClosedPolyline, horizontal_line_hits, vertical_line_hits
from .errors import EmptySegment, SegmentTouchesCurve, UnboundedSegment
from .segment import EndKind, HorizontalFreeSegment

FREE_MIN_FACTOR = 10.0


class ProfileSide(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"


class Facing(enum.Enum):
    """Side of a vertical boundary piece on which the unswept region lies."""

    LEFT = "left"
    RIGHT = "right"

    @property
    def opposite(self) -> "Facing":
        return Facing.RIGHT if self is Facing.LEFT else Facing.LEFT

    @property
    def sign(self) -> int:
        return 1 if self is Facing.RIGHT else -1


class ProfilePiece(NamedTuple):
    x_start: float
    x_end: float
    y_start: float
    y_end: float
    edge: int

    def __call__(self, x):
        if self.x_end == self.x_start:
            return self.y_start
        return self.y_start + (self.y_end - self.y_start) * (x - self.x_start) / (self.x_end - self.x_start)


@dataclass(frozen=True)
class Discontinuity:
    x: float
    y_minus: float
    y_plus: float
    free_subsegments: tuple[tuple[float, float], ...]


@dataclass(frozen=True, eq=False)
class Profile:
    side: ProfileSide
    pieces: tuple[ProfilePiece, ...]
    jumps: tuple[Discontinuity, ...] = ()

    @property
    def breakpoints(self) -> np.ndarray:
        return np.array([p.x_start for p in self.pieces] + [self.pieces[-1].x_end])

    def __call__(self, x):
        """Profile value at ``x`` (right-continuous at breakpoints)."""
        xs = self.breakpoints
        x = np.asarray(x, dtype=float)
        k = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(self.pieces) - 1)
        p = self.pieces
        xa = np.array([q.x_start for q in p])[k]
        xb = np.array([q.x_end for q in p])[k]
        ya = np.array([q.y_start for q in p])[k]
        yb = np.array([q.y_end for q in p])[k]
        return ya + (yb - ya) * (x - xa) / (xb - xa)


class Trapezoid(NamedTuple):
    """Open region between two linear functions over ``(x_left, x_right)``."""

    x_left: float
    x_right: float
    bottom_left: float
    bottom_right: float
    top_left: float
    top_right: float

    @property
    def area(self) -> float:
        return 0.5 * (self.x_right - self.x_left) * (
            (self.top_left - self.bottom_left) + (self.top_right - self.bottom_right)
        )

    def top(self, x):
        s = (x - self.x_left) / (self.x_right - self.x_left)
        return self.top_left + s * (self.top_right - self.top_left)

    def bottom(self, x):
        s = (x - self.x_left) / (self.x_right - self.x_left)
        return self.bottom_left + s * (self.bottom_right - self.bottom_left)

    def contains(self, x: float, y: float) -> bool:
        return self.x_left < x < self.x_right and self.bottom(x) < y < self.top(x)


# ---------------------------------------------------------------------------
# Boundary elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CurveArc:
    """Chain of points lying on the curve (possibly a single point)."""

    points: tuple[tuple[float, float], ...]

    @property
    def start(self) -> tuple[float, float]:
        return self.points[0]

    @property
    def end(self) -> tuple[float, float]:
        return self.points[-1]


@dataclass(frozen=True, eq=False)
class FreeVertical:
    """Vertical boundary piece whose interior avoids the curve.

    Traversal follows the counterclockwise boundary: pieces facing right are
    walked upward, pieces facing left downward.
    """

    x: float
    y_lo: float
    y_hi: float
    facing: Facing
    id: int | None = None
    node: int | None = None

    @property
    def length(self) -> float:
        return self.y_hi - self.y_lo

    @property
    def start(self) -> tuple[float, float]:
        return (self.x, self.y_lo) if self.facing is Facing.RIGHT else (self.x, self.y_hi)

    @property
    def end(self) -> tuple[float, float]:
        return (self.x, self.y_hi) if self.facing is Facing.RIGHT else (self.x, self.y_lo)

    @property
    def points(self) -> tuple[tuple[float, float], ...]:
        return (self.start, self.end)

    @property
    def midpoint(self) -> tuple[float, float]:
        return (self.x, 0.5 * (self.y_lo + self.y_hi))


@dataclass(frozen=True, eq=False)
class EndVertical(FreeVertical):
    """Limit chord at an end of ``t`` that lies in free space."""


Element = Union[CurveArc, FreeVertical]


@dataclass(frozen=True, eq=False)
class SweepBoundary:
    elements: tuple[Element, ...]

    @property
    def free_verticals(self) -> list[FreeVertical]:
        return [e for e in self.elements if isinstance(e, FreeVertical)]

    def flatten(self) -> np.ndarray:
        return flatten_elements(self.elements)


def flatten_elements(elements, tol: float = 0.0) -> np.ndarray:
    """Concatenate element point chains into one closed vertex loop."""
    pts: list[tuple[float, float]] = []
    for e in elements:
        for q in e.points:
            if pts and abs(q[0] - pts[-1][0]) <= tol and abs(q[1] - pts[-1][1]) <= tol:
                continue
            pts.append(q)
    if len(pts) > 1 and abs(pts[0][0] - pts[-1][0]) <= tol and abs(pts[0][1] - pts[-1][1]) <= tol:
        pts.pop()
    return np.array(pts, dtype=float).reshape(-1, 2)


class _BoundaryBuilder:
    def __init__(self, curve: ClosedPolyline, min_free: float):
        self.curve = curve
        self.min_free = min_free
        self.elements: list[Element] = []
        self.arc: list[tuple[float, float]] = []

    def point(self, x: float, y: float) -> None:
        if not self.arc or self.arc[-1] != (x, y):
            self.arc.append((x, y))

    def vertical(self, x: float, y_from: float, y_to: float, end: bool) -> None:
        lo, hi = min(y_from, y_to), max(y_from, y_to)
        free = []
        if hi - lo > self.min_free:
            free = vertical_line_hits(self.curve, x, lo, hi).free_intervals(lo, hi, self.min_free)
        cls = EndVertical if end else FreeVertical
        self.point(x, y_from)
        if y_to >= y_from:
            for f0, f1 in free:
                self.point(x, f0)
                self._free(cls(x, f0, f1, Facing.RIGHT))
        else:
            for f0, f1 in reversed(free):
                self.point(x, f1)
                self._free(cls(x, f0, f1, Facing.LEFT))
        self.point(x, y_to)

    def _free(self, fv: FreeVertical) -> None:
        self.elements.append(CurveArc(tuple(self.arc)))
        self.elements.append(fv)
        self.arc = [fv.end]

    def finish(self) -> tuple[Element, ...]:
        if not self.elements:
            pts = self.arc + [self.arc[0]] if self.arc[-1] != self.arc[0] else self.arc
            return (CurveArc(tuple(pts)),)
        first = self.elements[0]
        merged = self.arc + list(first.points[1:]) if self.arc[-1] == first.points[0] else self.arc + list(first.points)
        return (CurveArc(tuple(merged)),) + tuple(self.elements[1:])


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _SlabData:
    xs: np.ndarray
    up_edge: np.ndarray
    up_s: np.ndarray
    up_e: np.ndarray
    lo_edge: np.ndarray
    lo_s: np.ndarray
    lo_e: np.ndarray


def _slab_envelopes(curve: ClosedPolyline, t: HorizontalFreeSegment) -> _SlabData:
    a, b, y0 = t.x_left, t.x_right, t.y
    tol = curve.eps
    if not (np.isfinite(a) and np.isfinite(b)):
        raise UnboundedSegment("sweep segment must be finite")
    if b - a <= tol:
        raise EmptySegment(f"segment length {b - a:.3g} is not positive")
    for h in horizontal_line_hits(curve, y0, a, b).hits:
        if h.hi > a + tol and h.lo < b - tol:
            raise SegmentTouchesCurve(f"curve meets the sweep segment at x in [{h.lo}, {h.hi}]")

    x0, y0e, x1, y1e = curve.edges
    cand = curve.x_index.query(a, b)
    sw = x0[cand] > x1[cand]
    ax = np.where(sw, x1[cand], x0[cand])
    ay = np.where(sw, y1e[cand], y0e[cand])
    bx = np.where(sw, x0[cand], x1[cand])
    by = np.where(sw, y0e[cand], y1e[cand])

    # cluster breakpoints; every endpoint is mapped to the id of its cluster
    vals = np.clip(np.concatenate([[a, b], ax, bx]), a, b)
    order = np.argsort(vals, kind="stable")
    sv = vals[order]
    new = np.empty(sv.size, dtype=bool)
    new[0] = True
    np.greater(np.diff(sv), tol, out=new[1:])
    cid = np.empty(vals.size, np.int64)
    cid[order] = np.cumsum(new) - 1
    xs = sv[new].copy()
    xs[-1] = b
    m = len(xs) - 1
    nc = cand.size
    ka = cid[2:2 + nc]
    kb = cid[2 + nc:]
    cnt = np.maximum(kb - ka, 0)
    pe = np.repeat(np.arange(nc), cnt)
    ps = np.repeat(ka, cnt) + (np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt))
    xm = 0.5 * (xs[ps] + xs[ps + 1])
    dx = bx[pe] - ax[pe]
    ym = ay[pe] + (by[pe] - ay[pe]) * (xm - ax[pe]) / dx
    above = ym > y0

    def envelope(mask, upper):
        s, yv, ev = ps[mask], ym[mask], pe[mask]
        key = yv if upper else -yv
        o = np.lexsort((key, s))
        s, ev = s[o], ev[o]
        first = np.empty(s.size, dtype=bool)
        first[:1] = True
        np.not_equal(s[1:], s[:-1], out=first[1:])
        if first.sum() != m:
            raise UnboundedSegment("a chord of the sweep is unbounded")
        e = ev[first]
        xa, xb = xs[:-1], xs[1:]
        ys = ay[e] + (by[e] - ay[e]) * (xa - ax[e]) / (bx[e] - ax[e])
        ye = ay[e] + (by[e] - ay[e]) * (xb - ax[e]) / (bx[e] - ax[e])
        # endpoints that define a breakpoint take their exact vertex value
        k = np.arange(m)
        ys = np.where((ka[e] == k) & (ax[e] >= a - tol), ay[e], ys)
        ye = np.where((kb[e] == k + 1) & (bx[e] <= b + tol), by[e], ye)
        return cand[e], ys, ye

    up_edge, up_s, up_e = envelope(above, True)
    lo_edge, lo_s, lo_e = envelope(~above, False)
    return _SlabData(xs, up_edge, up_s, up_e, lo_edge, lo_s, lo_e)


def _merge_runs(keys: np.ndarray) -> np.ndarray:
    """Start indices of runs of equal consecutive keys (rows)."""
    if keys.ndim == 1:
        change = keys[1:] != keys[:-1]
    else:
        change = np.any(keys[1:] != keys[:-1], axis=1)
    return np.flatnonzero(np.concatenate(([True], change)))


def _profile(side: ProfileSide, xs, edge, ys, ye, curve: ClosedPolyline) -> Profile:
    starts = _merge_runs(edge)
    ends = np.append(starts[1:], len(edge)) - 1
    pieces = tuple(
        ProfilePiece(float(xs[s]), float(xs[e + 1]), float(ys[s]), float(ye[e]), int(edge[s]))
        for s, e in zip(starts.tolist(), ends.tolist())
    )
    prof = Profile(side, pieces)
    return replace(prof, jumps=tuple(detect_discontinuities(prof, curve)))


def compute_profiles(curve: ClosedPolyline, t: HorizontalFreeSegment) -> tuple[Profile, Profile]:
    """Upper and lower profiles of the sweep over ``t`` as exact piecewise-linear data."""
    d = _slab_envelopes(curve, t)
    return (
        _profile(ProfileSide.UPPER, d.xs, d.up_edge, d.up_s, d.up_e, curve),
        _profile(ProfileSide.LOWER, d.xs, d.lo_edge, d.lo_s, d.lo_e, curve),
    )


def detect_discontinuities(profile: Profile, curve: ClosedPolyline) -> list[Discontinuity]:
    """Breakpoints where the one-sided limits differ, with their free sub-intervals."""
    tol = curve.eps
    out = []
    for left, right in zip(profile.pieces[:-1], profile.pieces[1:]):
        ym, yp = left.y_end, right.y_start
        if abs(ym - yp) <= tol:
            continue
        x = right.x_start
        lo, hi = min(ym, yp), max(ym, yp)
        free = vertical_line_hits(curve, x, lo, hi).free_intervals(lo, hi, FREE_MIN_FACTOR * tol)
        out.append(Discontinuity(x, ym, yp, tuple(free)))
    return out


# ---------------------------------------------------------------------------
# Sweep assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HorizontalSweep:
    t: HorizontalFreeSegment
    upper: Profile
    lower: Profile
    trapezoids: tuple[Trapezoid, ...]
    boundary: SweepBoundary
    area: float

    @property
    def free_verticals(self) -> list[FreeVertical]:
        return self.boundary.free_verticals


def _trapezoids(d: _SlabData) -> tuple[Trapezoid, ...]:
    starts = _merge_runs(np.column_stack([d.up_edge, d.lo_edge]))
    ends = np.append(starts[1:], len(d.up_edge)) - 1
    xs = d.xs
    return tuple(
        Trapezoid(float(xs[s]), float(xs[e + 1]), float(d.lo_s[s]), float(d.lo_e[e]),
                  float(d.up_s[s]), float(d.up_e[e]))
        for s, e in zip(starts.tolist(), ends.tolist())
    )


def build_sweep(curve: ClosedPolyline, t: HorizontalFreeSegment) -> HorizontalSweep:
    """Build the horizontal sweep over ``t`` and its counterclockwise boundary.

    The boundary runs along the lower profile left to right, up the right end,
    back along the upper profile and down the left end.  Every vertical piece
    (jumps and ends) is split against the curve's hits on its line; the parts
    off the curve become :class:`FreeVertical` elements.
    """
    d = _slab_envelopes(curve, t)
    upper = _profile(ProfileSide.UPPER, d.xs, d.up_edge, d.up_s, d.up_e, curve)
    lower = _profile(ProfileSide.LOWER, d.xs, d.lo_edge, d.lo_s, d.lo_e, curve)
    traps = _trapezoids(d)
    tol = curve.eps
    bld = _BoundaryBuilder(curve, FREE_MIN_FACTOR * tol)
    a, b = t.x_left, t.x_right
    left_free = t.left_kind is not EndKind.ON_CURVE
    right_free = t.right_kind is not EndKind.ON_CURVE

    lp = lower.pieces
    bld.point(a, lp[0].y_start)
    for k, piece in enumerate(lp):
        if k:
            prev = lp[k - 1]
            if abs(prev.y_end - piece.y_start) > tol:
                bld.vertical(piece.x_start, prev.y_end, piece.y_start, False)
        bld.point(piece.x_start, piece.y_start)
        bld.point(piece.x_end, piece.y_end)

    up = upper.pieces
    bld.vertical(b, lp[-1].y_end, up[-1].y_end, right_free)
    for k in range(len(up) - 1, -1, -1):
        piece = up[k]
        bld.point(piece.x_end, piece.y_end)
        bld.point(piece.x_start, piece.y_start)
        if k:
            prev = up[k - 1]
            if abs(prev.y_end - piece.y_start) > tol:
                bld.vertical(piece.x_start, piece.y_start, prev.y_end, False)
    bld.vertical(a, up[0].y_start, lp[0].y_start, left_free)

    area = float(sum(tr.area for tr in traps))
    return HorizontalSweep(t, upper, lower, traps, SweepBoundary(bld.finish()), area)
