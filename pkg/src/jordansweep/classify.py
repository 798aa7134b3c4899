"""Point location, area and interior paths over a completed sweep state."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .curve import ClosedPolyline, Point2
from .errors import EmptyState, NoPath, NotInterior
from .segment import horizontal_segment_at

if TYPE_CHECKING:
    from .engine import SweepState


class Verdict(enum.Enum):
    INTERIOR = "Interior"
    EXTERIOR = "Exterior"
    ON_CURVE = "OnCurve"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Classification:
    """Verdict for one query point.

    ``method`` records how the verdict was reached: ``curve_distance``,
    ``trapezoid``, ``bbox``, ``inverted_sweep``, ``complement`` or
    ``ambiguous``.
    """

    verdict: Verdict
    distance_hint: float
    method: str


class SlabIndex:
    """Slab decomposition over trapezoids for batched point location.

    Slab boundaries are the distinct trapezoid x-extents.  Each slab lists
    the trapezoids spanning it ordered bottom to top, stored in CSR form.
    """

    def __init__(self, traps: np.ndarray, owners: np.ndarray):
        if len(traps) == 0:
            raise EmptyState("no trapezoids to index")
        self.traps = traps
        self.owners = owners
        xl, xr = traps[:, 0], traps[:, 1]
        self.xs = np.unique(np.concatenate([xl, xr]))
        k0 = np.searchsorted(self.xs, xl)
        k1 = np.searchsorted(self.xs, xr)
        cnt = k1 - k0
        ids = np.repeat(np.arange(len(traps)), cnt)
        slab = np.repeat(k0, cnt) + (np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt))
        xm = 0.5 * (self.xs[slab] + self.xs[slab + 1])
        mid_y = 0.5 * (self._bottom(ids, xm) + self._top(ids, xm))
        order = np.lexsort((mid_y, slab))
        self.ids = ids[order]
        self.indptr = np.concatenate([[0], np.cumsum(np.bincount(slab, minlength=len(self.xs) - 1))])

    @property
    def slab_count(self) -> int:
        return len(self.xs) - 1

    def _bottom(self, i, x):
        t = self.traps
        s = (x - t[i, 0]) / (t[i, 1] - t[i, 0])
        return t[i, 2] + s * (t[i, 3] - t[i, 2])

    def _top(self, i, x):
        t = self.traps
        s = (x - t[i, 0]) / (t[i, 1] - t[i, 0])
        return t[i, 4] + s * (t[i, 5] - t[i, 4])

    def locate(self, points, margin: float = 0.0) -> np.ndarray:
        """Index of the trapezoid strictly containing each point (by ``margin``), else -1."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        qx, qy = pts[:, 0], pts[:, 1]
        out = np.full(len(pts), -1, dtype=np.int64)
        k = np.searchsorted(self.xs, qx, side="right") - 1
        ok = (k >= 0) & (k < self.slab_count)
        q = np.flatnonzero(ok)
        if q.size == 0:
            return out
        k = k[q]
        x, y = qx[q], qy[q]
        lo = self.indptr[k].copy()
        hi = self.indptr[k + 1].copy()
        # find the last trapezoid whose bottom is at or below y
        while True:
            active = lo < hi
            if not active.any():
                break
            mid = (lo + hi) // 2
            cand = self.ids[np.minimum(mid, len(self.ids) - 1)]
            below = self._bottom(cand, x) <= y
            go_right = active & below
            lo = np.where(go_right, mid + 1, lo)
            hi = np.where(active & ~below, mid, hi)
        has = lo > self.indptr[k]
        c = self.ids[np.maximum(lo - 1, 0)]
        t = self.traps[c]
        inside = (
            has
            & (x > t[:, 0] + margin) & (x < t[:, 1] - margin)
            & (y > self._bottom(c, x) + margin) & (y < self._top(c, x) - margin)
        )
        out[q[inside]] = c[inside]
        return out

    def locate_linear(self, points, margin: float = 0.0) -> np.ndarray:
        """Reference implementation scanning every trapezoid."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        out = np.full(len(pts), -1, dtype=np.int64)
        t = self.traps
        for j, (x, y) in enumerate(pts):
            inx = (x > t[:, 0] + margin) & (x < t[:, 1] - margin)
            idx = np.flatnonzero(inx)
            if idx.size == 0:
                continue
            b = self._bottom(idx, x)
            tp = self._top(idx, x)
            hit = idx[(y > b + margin) & (y < tp - margin)]
            if hit.size:
                out[j] = hit[0]
        return out


def build_index(state: "SweepState") -> SlabIndex:
    """Slab index over all trapezoids of ``state`` (cached on the state)."""
    cached = getattr(state, "_slab_index", None)
    if cached is not None and cached[0] == len(state.trapezoids):
        return cached[1]
    if not state.trapezoids:
        raise EmptyState("state has no trapezoids")
    traps = np.array([tr for _, tr in state.trapezoids], dtype=float)
    owners = np.array([n for n, _ in state.trapezoids], dtype=np.int64)
    index = SlabIndex(traps, owners)
    state._slab_index = (len(state.trapezoids), index)
    return index


def _interior_mask(index: SlabIndex, pts: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Points strictly inside the swept union, and points that are ambiguous.

    A point inside a trapezoid by more than ``tol`` is interior.  A point
    close to a trapezoid side is interior when four diagonal probes at
    offset ``2 * tol`` all land inside trapezoids (it sits on a shared side).
    """
    strict = index.locate(pts, tol) >= 0
    loose = index.locate(pts, -tol) >= 0
    near = loose & ~strict
    if near.any():
        q = pts[near]
        d = 2 * tol
        probes = np.stack([q + (d, d), q + (d, -d), q + (-d, d), q + (-d, -d)], axis=1).reshape(-1, 2)
        inside = (index.locate(probes) >= 0).reshape(-1, 4).all(axis=1)
        idx = np.flatnonzero(near)
        strict[idx[inside]] = True
        near[idx[inside]] = False
    return strict, near


def _inverted(points: np.ndarray, center: Sequence[float]) -> np.ndarray:
    d = points - np.asarray(center, dtype=float)
    r2 = np.einsum("ij,ij->i", d, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        return d / r2[:, None]


def classify_points(index: SlabIndex, curve: ClosedPolyline, points,
                    exterior_state: "SweepState | None" = None) -> list[Classification]:
    """Classify many points at once; see :func:`classify_point`."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n == 0:
        return []
    tol = curve.eps
    dist = curve.distance(pts)
    on = dist <= tol
    interior, ambiguous = _interior_mask(index, pts, tol)
    bbox = curve.bbox
    outside_box = ~((pts[:, 0] >= bbox.min.x) & (pts[:, 0] <= bbox.max.x)
                    & (pts[:, 1] >= bbox.min.y) & (pts[:, 1] <= bbox.max.y))
    ext_confirmed = np.zeros(n, dtype=bool)
    if exterior_state is not None:
        ext_confirmed = exterior_membership(exterior_state, pts)
    out = []
    for i in range(n):
        d = float(dist[i])
        if on[i]:
            out.append(Classification(Verdict.ON_CURVE, d, "curve_distance"))
        elif interior[i]:
            out.append(Classification(Verdict.INTERIOR, d, "trapezoid"))
        elif ambiguous[i]:
            out.append(Classification(Verdict.UNKNOWN, d, "ambiguous"))
        elif outside_box[i]:
            out.append(Classification(Verdict.EXTERIOR, d, "bbox"))
        elif ext_confirmed[i]:
            out.append(Classification(Verdict.EXTERIOR, d, "inverted_sweep"))
        else:
            out.append(Classification(Verdict.EXTERIOR, 0.0, "complement"))
    return out


def classify_point(index: SlabIndex, curve: ClosedPolyline, q: Sequence[float],
                   exterior_state: "SweepState | None" = None) -> Classification:
    """Interior, Exterior, OnCurve or Unknown for a single point.

    OnCurve wins within ``curve.eps`` of the curve.  Interior requires the
    point to be inside the swept trapezoids.  Exterior comes from the
    bounding box, from the inverted exterior sweep when supplied, and
    otherwise by complement (labelled ``complement`` with a zero distance
    hint).
    """
    x, y = float(q[0]), float(q[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError("query point must be finite")
    return classify_points(index, curve, [(x, y)], exterior_state)[0]


def exterior_membership(exterior_state: "SweepState", points) -> np.ndarray:
    """Points whose inverted image lies in the exterior sweep's trapezoids."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    w = _inverted(pts, exterior_state.inversion_center)
    finite = np.all(np.isfinite(w), axis=1)
    out = np.zeros(len(pts), dtype=bool)
    if finite.any():
        inside, _ = _interior_mask(build_index(exterior_state), w[finite], exterior_state.curve.eps)
        out[finite] = inside
    return out


def interior_area(state: "SweepState") -> float:
    """Sum of trapezoid areas in node order."""
    items = sorted(range(len(state.trapezoids)), key=lambda i: state.trapezoids[i][0])
    return math.fsum(state.trapezoids[i][1].area for i in items)


# ---------------------------------------------------------------------------
# Rectilinear paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RectilinearPath:
    waypoints: tuple[Point2, ...]

    @property
    def turns(self) -> int:
        return max(0, len(self.waypoints) - 2)

    @property
    def length(self) -> float:
        w = np.array(self.waypoints)
        return float(np.abs(np.diff(w, axis=0)).sum()) if len(w) > 1 else 0.0

    def sample(self, spacing: float) -> np.ndarray:
        """Points along the path at most ``spacing`` apart, waypoints included."""
        out = [np.array(self.waypoints[:1], dtype=float)]
        for a, b in zip(self.waypoints[:-1], self.waypoints[1:]):
            seg = math.hypot(b[0] - a[0], b[1] - a[1])
            k = max(1, int(math.ceil(seg / spacing)))
            s = np.arange(1, k + 1)[:, None] / k
            out.append(np.asarray(a) + s * (np.asarray(b) - np.asarray(a)))
        return np.concatenate(out)


def _simplify(points: list[tuple[float, float]]) -> tuple[Point2, ...]:
    pts: list[tuple[float, float]] = []
    for p in points:
        if pts and pts[-1] == p:
            continue
        if len(pts) >= 2:
            a, b = pts[-2], pts[-1]
            if (a[0] == b[0] == p[0]) or (a[1] == b[1] == p[1]):
                pts[-1] = p
                continue
        pts.append(p)
    return tuple(Point2(float(x), float(y)) for x, y in pts)


def _node_trap_at(state: "SweepState", node: int, x: float, y: float) -> bool:
    for tr in state.tree[node].sweep.trapezoids:
        if tr.x_left < x < tr.x_right and tr.bottom(x) < y < tr.top(x):
            return True
    return False


def _bridge_x(state: "SweepState", parent: int, child: int) -> float:
    """A point on the parent's side of the child's site from which the site height is reachable.

    The horizontal step from the site to the returned point stays on the
    curve-free horizontal segment through the site, and the point itself lies
    in one of the parent's trapezoids.
    """
    nd = state.tree[child]
    d, ys = float(nd.site.p[0]), float(nd.site.p[1])
    sgn = -nd.site.direction.sign
    pt = state.tree[parent].t
    free = horizontal_segment_at(state.curve, (d, ys))
    room = d - free.x_left if sgn < 0 else free.x_right - d
    delta = 0.5 * min(room, pt.length)
    for _ in range(80):
        x_in = d + sgn * delta
        if pt.x_left < x_in < pt.x_right and _node_trap_at(state, parent, x_in, ys):
            return x_in
        delta *= 0.5
    raise NoPath(f"no bridge between nodes {parent} and {child}")


def _ancestors(state: "SweepState", n: int) -> list[int]:
    out = [n]
    while state.tree[out[-1]].parent is not None:
        out.append(state.tree[out[-1]].parent)
    return out


def connectivity_path(state: "SweepState", q1: Sequence[float], q2: Sequence[float]) -> RectilinearPath:
    """Axis-parallel path between two interior points through the sweep tree.

    Each point moves vertically to its node's sweep segment; the path then
    follows sweep segments up to the common ancestor and back down, crossing
    from a node to its child at the child's site height.
    """
    index = build_index(state)
    p1 = np.array([q1, q2], dtype=float)
    loc = index.locate(p1)
    tol = state.curve.eps
    dist = state.curve.distance(p1)
    if loc[0] < 0 or dist[0] <= tol:
        raise NotInterior(f"{tuple(q1)} is not interior")
    if loc[1] < 0 or dist[1] <= tol:
        raise NotInterior(f"{tuple(q2)} is not interior")
    n1, n2 = int(index.owners[loc[0]]), int(index.owners[loc[1]])
    up = _ancestors(state, n1)
    down = _ancestors(state, n2)
    common = set(up) & set(down)
    lca = next(n for n in up if n in common)
    up = up[: up.index(lca) + 1]
    down = down[: down.index(lca)][::-1]

    pts: list[tuple[float, float]] = [(float(q1[0]), float(q1[1])), (float(q1[0]), state.tree[n1].t.y)]
    for child, parent in zip(up[:-1], up[1:]):
        x_in = _bridge_x(state, parent, child)
        pts.append((x_in, state.tree[child].t.y))
        pts.append((x_in, state.tree[parent].t.y))
    for child in down:
        parent = state.tree[child].parent
        x_in = _bridge_x(state, parent, child)
        pts.append((x_in, state.tree[parent].t.y))
        pts.append((x_in, state.tree[child].t.y))
    pts.append((float(q2[0]), state.tree[n2].t.y))
    pts.append((float(q2[0]), float(q2[1])))
    return RectilinearPath(_simplify(pts))


def path_is_interior(state: "SweepState", path: RectilinearPath, spacing: float) -> bool:
    samples = path.sample(spacing)
    interior, _ = _interior_mask(build_index(state), samples, state.curve.eps)
    return bool(interior.all())


# ---------------------------------------------------------------------------
# CSV batch I/O
# ---------------------------------------------------------------------------

def read_points_csv(path: str | Path) -> np.ndarray:
    """Read ``x,y`` rows; raises ``ValueError`` naming the first malformed row (1-based)."""
    rows = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ValueError(f"row {i}: expected 2 fields, got {len(row)}")
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                raise ValueError(f"row {i}: non-numeric value {row!r}") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError(f"row {i}: non-finite value {row!r}")
            rows.append((x, y))
    return np.array(rows, dtype=float).reshape(-1, 2)


def write_classifications_csv(path: str | Path, points: np.ndarray,
                              results: Iterable[Classification]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for (x, y), r in zip(points, results):
            w.writerow([repr(float(x)), repr(float(y)), r.verdict.value, f"{r.distance_hint:.12g}"])
