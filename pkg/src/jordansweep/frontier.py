"""The piecewise-vertical boundary of the swept region and its extension by splicing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .curve import ClosedPolyline, Point2, horizontal_line_hits, polyline_self_intersections, vertical_line_hits
from .errors import NoRoom, PointOnCurve, SegmentTooShort, SpliceMismatch, UnboundedSegment
from .segment import EndKind, HorizontalFreeSegment
from .sweep import (
    FREE_MIN_FACTOR,
    CurveArc,
    Element,
    EndVertical,
    Facing,
    FreeVertical,
    HorizontalSweep,
    flatten_elements,
)


@dataclass(frozen=True)
class ExtensionSite:
    """Point ``p`` on a frontier vertical and the side on which unswept space lies."""

    segment_id: int
    p: Point2
    direction: Facing


@dataclass(frozen=True)
class SpliceResult:
    consumed: FreeVertical
    shared: tuple[float, float]
    added: tuple[FreeVertical, ...]


@dataclass(frozen=True)
class BoundaryDiagnostics:
    closure_gap: float
    self_intersections: int
    clearance_violations: int
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.closure_gap <= self.tolerance and self.self_intersections == 0 and self.clearance_violations == 0


class FrontierBoundary:
    """Closed boundary loop stored as a doubly linked list of elements.

    Free verticals carry a unique ``id`` and the node that generated them.
    Active verticals are mirrored in flat arrays so proximity tests for a
    proposed extension segment stay vectorized.
    """

    def __init__(self, curve: ClosedPolyline, elements: Iterable[Element] = ()):
        self.curve = curve
        self._elem: dict[int, Element] = {}
        self._next: dict[int, int] = {}
        self._prev: dict[int, int] = {}
        self._head: int | None = None
        self._handles = 0
        self._handle_of: dict[int, int] = {}
        self.vertical_index: dict[int, FreeVertical] = {}
        self.next_id = 0
        self._x = np.empty(16)
        self._lo = np.empty(16)
        self._hi = np.empty(16)
        self._active = np.zeros(16, dtype=bool)
        elems = list(elements)
        if elems:
            self._link_new(elems, None, None)

    # -- construction ---------------------------------------------------
    @classmethod
    def from_sweep(cls, curve: ClosedPolyline, sweep: HorizontalSweep, node: int = 0) -> "FrontierBoundary":
        k = cls(curve)
        k._link_new([k._register(e, node) for e in sweep.boundary.elements], None, None)
        return k

    def copy(self) -> "FrontierBoundary":
        k = FrontierBoundary.__new__(FrontierBoundary)
        k.curve = self.curve
        k._elem = dict(self._elem)
        k._next = dict(self._next)
        k._prev = dict(self._prev)
        k._head = self._head
        k._handles = self._handles
        k._handle_of = dict(self._handle_of)
        k.vertical_index = dict(self.vertical_index)
        k.next_id = self.next_id
        k._x, k._lo, k._hi, k._active = self._x.copy(), self._lo.copy(), self._hi.copy(), self._active.copy()
        return k

    def _register(self, e: Element, node: int) -> Element:
        if not isinstance(e, FreeVertical):
            return e
        fid = self.next_id
        self.next_id += 1
        if fid >= self._x.size:
            grow = self._x.size * 2
            self._x = np.resize(self._x, grow)
            self._lo = np.resize(self._lo, grow)
            self._hi = np.resize(self._hi, grow)
            act = np.zeros(grow, dtype=bool)
            act[: self._active.size] = self._active
            self._active = act
        self._x[fid], self._lo[fid], self._hi[fid] = e.x, e.y_lo, e.y_hi
        self._active[fid] = True
        fv = replace(e, id=fid, node=node)
        self.vertical_index[fid] = fv
        return fv

    def _retire(self, fid: int) -> None:
        self.vertical_index.pop(fid, None)
        self._handle_of.pop(fid, None)
        self._active[fid] = False

    def _new_handle(self, e: Element) -> int:
        h = self._handles
        self._handles += 1
        self._elem[h] = e
        if isinstance(e, FreeVertical) and e.id is not None:
            self._handle_of[e.id] = h
        return h

    def _link_new(self, elems: list[Element], before: int | None, after: int | None) -> list[int]:
        """Insert ``elems`` between handles ``before`` and ``after`` (empty list: whole loop)."""
        hs = [self._new_handle(e) for e in elems]
        for a, b in zip(hs[:-1], hs[1:]):
            self._next[a], self._prev[b] = b, a
        if before is None:
            self._next[hs[-1]], self._prev[hs[0]] = hs[0], hs[-1]
            self._head = hs[0]
        else:
            self._next[before], self._prev[hs[0]] = hs[0], before
            self._next[hs[-1]], self._prev[after] = after, hs[-1]
        return hs

    def _unlink(self, h: int) -> None:
        p, n = self._prev.pop(h), self._next.pop(h)
        self._elem.pop(h)
        if p != h:
            self._next[p], self._prev[n] = n, p
        if self._head == h:
            self._head = n if n != h else None

    # -- views ------------------------------------------------------------
    @property
    def elements(self) -> list[Element]:
        out = []
        h = self._head
        if h is None:
            return out
        while True:
            out.append(self._elem[h])
            h = self._next[h]
            if h == self._head:
                return out

    @property
    def free_verticals(self) -> list[FreeVertical]:
        return [e for e in self.elements if isinstance(e, FreeVertical)]

    def __len__(self) -> int:
        return len(self._elem)

    def get(self, fid: int) -> FreeVertical:
        try:
            return self.vertical_index[fid]
        except KeyError:
            raise SpliceMismatch(f"no active frontier segment with id {fid}") from None

    def active_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        n = self.next_id
        return self._x[:n], self._lo[:n], self._hi[:n], self._active[:n]

    def to_json(self) -> list[dict]:
        out = []
        for e in self.elements:
            if isinstance(e, FreeVertical):
                out.append({
                    "kind": "end_vertical" if isinstance(e, EndVertical) else "free_vertical",
                    "start": list(e.start), "end": list(e.end),
                    "id": e.id, "node": e.node, "facing": e.facing.value,
                })
            else:
                out.append({"kind": "curve_arc", "start": list(e.start), "end": list(e.end),
                            "points": [list(q) for q in e.points]})
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    # -- splicing ---------------------------------------------------------
    def splice_inplace(self, site: ExtensionSite, sweep: HorizontalSweep, node: int) -> SpliceResult:
        """Replace the shared part of the site's vertical with the new sweep's boundary."""
        v = self.get(site.segment_id)
        tol = self.curve.eps
        min_free = FREE_MIN_FACTOR * tol
        py = site.p[1]
        elems = sweep.boundary.elements
        want = v.facing.opposite
        matches = [
            j for j, e in enumerate(elems)
            if isinstance(e, FreeVertical) and e.facing is want and abs(e.x - v.x) <= tol
            and e.y_lo - tol <= py <= e.y_hi + tol
        ]
        if len(matches) != 1:
            raise SpliceMismatch(f"found {len(matches)} near-end pieces at x={v.x} containing y={py}")
        j = matches[0]
        piece = elems[j]
        s_lo, s_hi = max(v.y_lo, piece.y_lo), min(v.y_hi, piece.y_hi)
        if s_hi - s_lo <= tol or not (s_lo < py < s_hi):
            raise SpliceMismatch(f"shared segment ({s_lo}, {s_hi}) is empty or misses the site")
        x = v.x
        after = list(elems[j + 1:]) + list(elems[:j])

        def vert(lo, hi, facing, owner):
            if hi - lo <= min_free:
                pts = ((x, hi), (x, lo)) if facing is Facing.LEFT else ((x, lo), (x, hi))
                return CurveArc(pts) if hi > lo else None
            return self._register(FreeVertical(x, lo, hi, facing), owner)

        if v.facing is Facing.LEFT:
            head = [vert(s_hi, v.y_hi, Facing.LEFT, v.node), vert(s_hi, piece.y_hi, Facing.RIGHT, node)]
            tail = [vert(piece.y_lo, s_lo, Facing.RIGHT, node), vert(v.y_lo, s_lo, Facing.LEFT, v.node)]
        else:
            head = [vert(v.y_lo, s_lo, Facing.RIGHT, v.node), vert(piece.y_lo, s_lo, Facing.LEFT, node)]
            tail = [vert(piece.y_hi, s_hi, Facing.LEFT, node), vert(s_hi, v.y_hi, Facing.RIGHT, v.node)]
        middle = [self._register(e, node) for e in after]
        seq = [e for e in head + middle + tail if e is not None]

        h = self._handle_of[v.id]
        before, nxt = self._prev[h], self._next[h]
        self._retire(v.id)
        if before == h:
            self._unlink(h)
            hs = self._link_new(seq, None, None)
        else:
            self._unlink(h)
            hs = self._link_new(seq, before, nxt)
            hs = [before] + hs + [nxt]
        self._merge_arcs(hs)
        added = tuple(e for e in seq if isinstance(e, FreeVertical))
        return SpliceResult(v, (s_lo, s_hi), added)

    def _merge_arcs(self, handles: Sequence[int]) -> None:
        """Merge runs of consecutive curve arcs touching the given handles."""
        for h in handles:
            if h not in self._elem or not isinstance(self._elem[h], CurveArc):
                continue
            while len(self._elem) > 1:
                n = self._next[h]
                e, f = self._elem[h], self._elem[n]
                if n == h or not isinstance(f, CurveArc):
                    break
                pts = e.points + (f.points[1:] if f.points[0] == e.points[-1] else f.points)
                self._elem[h] = CurveArc(pts)
                if self._head == n:
                    self._head = h
                self._unlink(n)


def splice(K: FrontierBoundary, site: ExtensionSite, new_sweep: HorizontalSweep,
           node: int | None = None) -> FrontierBoundary:
    """Return a copy of ``K`` extended by ``new_sweep`` through ``site``."""
    out = K.copy()
    out.splice_inplace(site, new_sweep, node if node is not None else -1)
    return out


def select_extension_site(v: FreeVertical, eps_min: float) -> ExtensionSite:
    """Midpoint of ``v``, extending toward its unswept side."""
    if v.length <= eps_min:
        raise SegmentTooShort(f"segment length {v.length:.3g} <= eps_min {eps_min:.3g}")
    return ExtensionSite(v.id if v.id is not None else -1, Point2(*v.midpoint), v.facing)


def propose_extension_segment(curve: ClosedPolyline, K: FrontierBoundary, site: ExtensionSite,
                              room_min: float | None = None, cap_fraction: float | None = None,
                              uncapped: bool = False) -> HorizontalFreeSegment:
    """Greedy horizontal segment from ``site.p`` into unswept space.

    The segment runs until the first curve hit or until it comes within
    tolerance of another frontier vertical.  ``cap_fraction`` shortens it to
    that fraction of the available room (used to provoke slowly converging
    chains in tests).  Sites with no more than ``room_min`` of room (default
    ``10 * curve.eps``) raise :class:`NoRoom`.
    """
    px, py = float(site.p[0]), float(site.p[1])
    tol = curve.eps
    sgn = site.direction.sign
    stop = _first_hit(curve, px, py, sgn)
    kind = EndKind.ON_CURVE
    xs, lo, hi, act = K.active_arrays()
    dist = (xs - px) * sgn
    near = act & (dist > tol) & (dist <= abs(stop - px) + tol) & (lo - tol <= py) & (py <= hi + tol)
    if near.any():
        x_near = xs[near][np.argmin(dist[near])]
        stop = x_near - sgn * tol
        kind = EndKind.FREE
    room = abs(stop - px)
    if room_min is None:
        room_min = FREE_MIN_FACTOR * tol
    if room <= room_min:
        raise NoRoom(f"only {room:.3g} of room from {tuple(site.p)}")
    if cap_fraction is not None and not uncapped:
        stop = px + sgn * cap_fraction * room
        kind = EndKind.FREE
    if sgn > 0:
        return HorizontalFreeSegment(py, px, stop, EndKind.FREE, kind)
    return HorizontalFreeSegment(py, stop, px, kind, EndKind.FREE)


def _first_hit(curve: ClosedPolyline, px: float, py: float, sgn: int) -> float:
    """x of the first curve hit from ``(px, py)`` in direction ``sgn``, searched in growing windows."""
    tol = curve.eps
    bb = curve.bbox
    limit = bb.max.x - px if sgn > 0 else px - bb.min.x
    width = max(bb.width / 64, 16 * tol)
    while True:
        lo, hi = (px, px + width) if sgn > 0 else (px - width, px)
        hits = horizontal_line_hits(curve, py, lo, hi).hits
        for hh in hits:
            if hh.lo - tol <= px <= hh.hi + tol:
                raise PointOnCurve(f"site {(px, py)} lies on the curve")
        if sgn > 0:
            ahead = [hh.lo for hh in hits if px < hh.lo <= hi]
        else:
            ahead = [hh.hi for hh in hits if lo <= hh.hi < px]
        if ahead:
            return min(ahead) if sgn > 0 else max(ahead)
        if width >= limit + tol:
            raise UnboundedSegment("extension segment leaves the curve's bounded side")
        width *= 4


def validate_boundary(K: FrontierBoundary) -> BoundaryDiagnostics:
    """Numeric checks that ``K`` is a closed, simple loop with clean frontier pieces."""
    curve = K.curve
    tol = curve.eps
    elems = K.elements
    gap = 0.0
    for e, f in zip(elems, elems[1:] + elems[:1]):
        a, b = e.end, f.start
        gap = max(gap, float(np.hypot(a[0] - b[0], a[1] - b[1])))
    pts = flatten_elements(elems, tol)
    crossings = len(polyline_self_intersections(pts, tol)) if len(pts) >= 4 else 0
    margin = FREE_MIN_FACTOR * tol
    bad = 0
    for fv in K.vertical_index.values():
        for hh in vertical_line_hits(curve, fv.x, fv.y_lo, fv.y_hi).hits:
            if hh.hi > fv.y_lo + margin and hh.lo < fv.y_hi - margin:
                bad += 1
                break
    return BoundaryDiagnostics(gap, crossings, bad, tol)
