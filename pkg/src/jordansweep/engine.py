"""Sweepline driver: root point, extension queue, recursion tree and ray diagnostics."""

from __future__ import annotations

import collections
import enum
import heapq
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .curve import ClosedPolyline, Point2, vertical_line_hits
from .errors import (
    CenterOnCurve,
    CurveError,
    NonSimpleImage,
    NoRoom,
    NotMaximal,
    QueueEmpty,
    RootNotFound,
    SegmentTooShort,
)
from .frontier import (
    ExtensionSite,
    FrontierBoundary,
    propose_extension_segment,
    select_extension_site,
)
from .segment import EndKind, HorizontalFreeSegment, horizontal_segment_at, open_segment_at
from .sweep import FreeVertical, HorizontalSweep, Trapezoid, build_sweep

EPS_MIN_REL = 1e-6
RAY_MIN_CHAIN = 8
RAY_CONTRACTION = 0.9


class Order(enum.Enum):
    FIFO = "fifo"
    LIFO = "lifo"
    LARGEST_FIRST = "largest"


class Verdict(enum.Enum):
    TERMINATING = "terminating"
    NON_TERMINATING_SUSPECTED = "non_terminating_suspected"


@dataclass(frozen=True)
class EnginePolicy:
    """Run configuration.

    ``eps_min`` of ``None`` means ``1e-6`` times the curve's bounding-box
    diagonal.  ``cap_fraction`` shortens every extension segment to that
    fraction of the available room; it exists to exercise the ray guard.
    """

    order: Order = Order.LARGEST_FIRST
    eps_min: float | None = None
    max_steps: int = 10**6
    ray_guard_window: int = 64
    cap_fraction: float | None = None

    def __post_init__(self):
        if self.eps_min is not None and not self.eps_min > 0:
            raise ValueError("eps_min must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.cap_fraction is not None and not 0 < self.cap_fraction < 1:
            raise ValueError("cap_fraction must lie in (0, 1)")

    def resolved_eps_min(self, curve: ClosedPolyline) -> float:
        return self.eps_min if self.eps_min is not None else EPS_MIN_REL * curve.bbox.diagonal


@dataclass
class SweepNode:
    id: int
    t: HorizontalFreeSegment
    sweep: HorizontalSweep
    parent: int | None = None
    children: list[int] = field(default_factory=list)
    segment_id: int | None = None
    site: ExtensionSite | None = None
    shared: tuple[float, float] | None = None


@dataclass(frozen=True)
class RayDiagnostic:
    chain: tuple[int, ...]
    limiting_segment_estimate: tuple[float, float, float]
    verdict: Verdict

    def to_json(self) -> dict:
        x, lo, hi = self.limiting_segment_estimate
        return {"chain": list(self.chain), "limiting_segment": {"x": x, "y_lo": lo, "y_hi": hi},
                "verdict": self.verdict.value}


class _Queue:
    def __init__(self, order: Order):
        self.order = order
        self._dq: collections.deque[int] = collections.deque()
        self._heap: list[tuple[float, int]] = []

    def push(self, fv: FreeVertical) -> None:
        if self.order is Order.LARGEST_FIRST:
            heapq.heappush(self._heap, (-fv.length, fv.id))
        else:
            self._dq.append(fv.id)

    def pop(self) -> int:
        if self.order is Order.LARGEST_FIRST:
            return heapq.heappop(self._heap)[1]
        return self._dq.popleft() if self.order is Order.FIFO else self._dq.pop()

    def ids(self) -> list[int]:
        return [i for _, i in self._heap] if self.order is Order.LARGEST_FIRST else list(self._dq)

    def __len__(self) -> int:
        return len(self._heap) + len(self._dq)


@dataclass
class SweepState:
    curve: ClosedPolyline
    policy: EnginePolicy
    eps_min: float
    tree: list[SweepNode]
    frontier: FrontierBoundary
    trapezoids: list[tuple[int, Trapezoid]]
    total_area: float
    queue: _Queue
    step_count: int
    area_history: list[float]
    retired: dict[int, str] = field(default_factory=dict)
    step_limit_reached: bool = False
    ray_diagnostics: list[RayDiagnostic] = field(default_factory=list)
    uncapped: set[int] = field(default_factory=set)
    root_method: str = "given"
    inversion_center: Point2 | None = None
    root_point: Point2 | None = None

    @property
    def maximal(self) -> bool:
        return len(self.queue) == 0

    @property
    def pending(self) -> list[int]:
        return self.queue.ids()

    def report(self) -> dict:
        return {
            "steps": self.step_count,
            "total_area": self.total_area,
            "frontier_remaining": len(self.frontier.vertical_index),
            "area_history": list(self.area_history),
            "policy": self.policy.order.value,
            "eps_min": self.eps_min,
            "ray_diagnostics": [d.to_json() for d in self.ray_diagnostics],
        }

    def report_json(self) -> str:
        return json.dumps(self.report(), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Root point
# ---------------------------------------------------------------------------

def _inside_by_parity(curve: ClosedPolyline, p: Sequence[float]) -> bool:
    hits = vertical_line_hits(curve, p[0]).hits
    return sum(1 for h in hits if h.lo > p[1] and h.crossing) % 2 == 1


def find_root_point_with_method(curve: ClosedPolyline) -> tuple[Point2, str]:
    """Root point on the middle vertical line, plus which construction produced it.

    The curve is split at its leftmost and rightmost vertices into two arcs.
    Along the middle vertical line, hits are labelled by arc; a bisection over
    the ordered hits finds two consecutive hits on different arcs, and the
    midpoint of the chord between them is returned.  When that fails
    numerically, the vertex centroid is tried instead.
    """
    v = curve.vertices
    n = len(v)
    i_min = int(np.argmin(v[:, 0]))
    i_max = int(np.argmax(v[:, 0]))
    arc = np.full(n, 2, dtype=np.int8)
    e = i_min
    while e != i_max:
        arc[e] = 1
        e = (e + 1) % n
    xl = float(0.5 * (v[i_min, 0] + v[i_max, 0]))
    hits = vertical_line_hits(curve, xl).hits
    labels = [int(arc[h.edges[0]]) for h in hits]
    if len(hits) >= 2:
        lo, hi = 0, len(hits) - 1
        if labels[lo] == labels[hi]:
            pairs = [k for k in range(len(hits) - 1) if labels[k] != labels[k + 1]]
            lo, hi = (pairs[0], pairs[0] + 1) if pairs else (0, 0)
        for _ in range(64):
            if hi - lo <= 1:
                break
            mid = (lo + hi) // 2
            if labels[mid] != labels[lo]:
                hi = mid
            else:
                lo = mid
        if hi - lo == 1 and labels[lo] != labels[hi]:
            p = Point2(xl, 0.5 * (hits[lo].hi + hits[hi].lo))
            if _root_ok(curve, p):
                return p, "arc_bisection"
    c = v.mean(axis=0)
    p = Point2(float(c[0]), float(c[1]))
    if _root_ok(curve, p):
        return p, "vertex_centroid"
    raise RootNotFound("no interior root point found")


def _root_ok(curve: ClosedPolyline, p: Point2) -> bool:
    if not (math.isfinite(p.x) and math.isfinite(p.y)):
        return False
    try:
        s = open_segment_at(curve, p)
    except CurveError:
        return False
    except Exception:
        return False
    return s.finite and _inside_by_parity(curve, p)


def find_root_point(curve: ClosedPolyline) -> Point2:
    return find_root_point_with_method(curve)[0]


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

StepObserver = Callable[["SweepState", SweepNode], None]


def start_state(curve: ClosedPolyline, p_star: Sequence[float], policy: EnginePolicy | None = None) -> SweepState:
    """State holding only the root sweep over the horizontal segment through ``p_star``."""
    policy = policy or EnginePolicy()
    p = Point2(float(p_star[0]), float(p_star[1]))
    t = horizontal_segment_at(curve, p)
    if policy.cap_fraction is not None:
        t = HorizontalFreeSegment(t.y, t.x_left, p.x + policy.cap_fraction * (t.x_right - p.x),
                                  t.left_kind, EndKind.FREE)
    sweep = build_sweep(curve, t)
    frontier = FrontierBoundary.from_sweep(curve, sweep, 0)
    queue = _Queue(policy.order)
    for fv in frontier.free_verticals:
        queue.push(fv)
    root = SweepNode(0, t, sweep)
    return SweepState(
        curve=curve, policy=policy, eps_min=policy.resolved_eps_min(curve), tree=[root],
        frontier=frontier, trapezoids=[(0, tr) for tr in sweep.trapezoids], total_area=sweep.area,
        queue=queue, step_count=1, area_history=[sweep.area], root_point=p,
    )


def step(state: SweepState, policy: EnginePolicy | None = None) -> SweepNode:
    """Pop one frontier segment and extend the swept region through it.

    Raises :class:`QueueEmpty` when nothing is pending, and
    :class:`SegmentTooShort` or :class:`NoRoom` after retiring a segment that
    cannot be extended; those retirements do not count as steps.
    """
    policy = policy or state.policy
    if not state.queue:
        raise QueueEmpty("no pending frontier segments")
    fid = state.queue.pop()
    v = state.frontier.get(fid)
    try:
        site = select_extension_site(v, state.eps_min)
        t = propose_extension_segment(state.curve, state.frontier, site, None,
                                      policy.cap_fraction, uncapped=fid in state.uncapped)
    except (SegmentTooShort, NoRoom) as exc:
        state.retired[fid] = type(exc).__name__
        state.frontier._retire(fid)
        raise
    sweep = build_sweep(state.curve, t)
    node_id = len(state.tree)
    result = state.frontier.splice_inplace(site, sweep, node_id)
    node = SweepNode(node_id, t, sweep, parent=v.node, segment_id=fid, site=site, shared=result.shared)
    state.tree.append(node)
    state.tree[v.node].children.append(node_id)
    state.retired[fid] = "consumed"
    state.trapezoids.extend((node_id, tr) for tr in sweep.trapezoids)
    state.total_area += sweep.area
    state.area_history.append(state.total_area)
    state.step_count += 1
    for fv in result.added:
        state.queue.push(fv)
    _guard_newest(state, policy, node, result.added)
    return node


def run_sweep(curve: ClosedPolyline, p_star: Sequence[float] | None = None,
              policy: EnginePolicy | None = None, observer: StepObserver | None = None) -> SweepState:
    """Run extensions until no pending segment is longer than ``eps_min``.

    When ``max_steps`` sweeps have been made with work still pending the
    state is returned with ``step_limit_reached`` set.
    """
    policy = policy or EnginePolicy()
    method = "given"
    if p_star is None:
        p_star, method = find_root_point_with_method(curve)
    state = start_state(curve, p_star, policy)
    state.root_method = method
    if observer is not None:
        observer(state, state.tree[0])
    while state.queue:
        if state.step_count >= policy.max_steps:
            state.step_limit_reached = True
            break
        try:
            node = step(state, policy)
        except (SegmentTooShort, NoRoom):
            continue
        if observer is not None:
            observer(state, node)
    return state


# ---------------------------------------------------------------------------
# Ray guard
# ---------------------------------------------------------------------------

def _chain(state: SweepState, node_id: int, window: int) -> list[int]:
    out = [node_id]
    while len(out) < window and state.tree[out[-1]].parent is not None:
        out.append(state.tree[out[-1]].parent)
    return out[::-1]


def _examine_chain(state: SweepState, chain: Sequence[int]) -> RayDiagnostic | None:
    nodes = [state.tree[i] for i in chain if state.tree[i].site is not None]
    if len(nodes) < RAY_MIN_CHAIN:
        return None
    nodes = nodes[-RAY_MIN_CHAIN:]
    ids = tuple(nd.id for nd in nodes)
    xs = [float(nd.site.p[0]) for nd in nodes]
    lo = [nd.shared[0] for nd in nodes]
    hi = [nd.shared[1] for nd in nodes]
    eps_min = state.eps_min
    nested_lo, nested_hi = max(lo), min(hi)
    adv = [abs(b - a) for a, b in zip(xs, xs[1:])]
    if min(adv) <= 0:
        return RayDiagnostic(ids, (xs[-1], lo[-1], hi[-1]), Verdict.TERMINATING)
    ratios = [b / a for a, b in zip(adv, adv[1:])]
    r = sum(ratios) / len(ratios)
    step_dir = 1.0 if xs[-1] > xs[-2] else -1.0
    x_lim = xs[-1] + step_dir * adv[-1] * r / (1 - r) if r < 1 else xs[-1]
    first = hi[0] - lo[0]
    suspected = (
        max(ratios) <= RAY_CONTRACTION
        and min(h - l for l, h in zip(lo, hi)) >= eps_min
        and hi[-1] - lo[-1] >= 0.5 * first
        and nested_hi - nested_lo >= max(eps_min, 0.5 * first)
    )
    verdict = Verdict.NON_TERMINATING_SUSPECTED if suspected else Verdict.TERMINATING
    return RayDiagnostic(ids, (x_lim, nested_lo, nested_hi), verdict)


def _guard_newest(state: SweepState, policy: EnginePolicy, node: SweepNode,
                  added: Sequence[FreeVertical]) -> None:
    # cheap necessary conditions before the full chain examination: the
    # chain's shared intervals must stay nested and its advances contract
    tree = state.tree
    nested_lo, nested_hi = node.shared
    cur, prev_adv, depth = node, None, 1
    while depth < RAY_MIN_CHAIN:
        if cur.parent is None:
            return
        par = tree[cur.parent]
        if par.site is None:
            return
        nested_lo, nested_hi = max(nested_lo, par.shared[0]), min(nested_hi, par.shared[1])
        if nested_hi - nested_lo < state.eps_min:
            return
        adv = abs(cur.site.p[0] - par.site.p[0])
        if prev_adv is not None and not 0 < prev_adv <= RAY_CONTRACTION * adv:
            return
        prev_adv, cur, depth = adv, par, depth + 1
    first = cur.shared[1] - cur.shared[0]
    if nested_hi - nested_lo < 0.5 * first or node.shared[1] - node.shared[0] < 0.5 * first:
        return
    diag = _examine_chain(state, _chain(state, node.id, min(policy.ray_guard_window, RAY_MIN_CHAIN + 1)))
    if diag is None or diag.verdict is not Verdict.NON_TERMINATING_SUSPECTED:
        return
    if any(set(diag.chain) & set(d.chain) for d in state.ray_diagnostics):
        return
    state.ray_diagnostics.append(diag)
    # remediation: the next extension along this chain runs the full available room
    for fv in added:
        state.uncapped.add(fv.id)


def ray_guard(state: SweepState, policy: EnginePolicy | None = None) -> list[RayDiagnostic]:
    """Examine the chains ending at the most recent nodes for slowly converging rays."""
    policy = policy or state.policy
    recent = range(max(1, len(state.tree) - policy.ray_guard_window), len(state.tree))
    leaves = [i for i in recent if not state.tree[i].children]
    out = []
    for i in leaves:
        d = _examine_chain(state, _chain(state, i, policy.ray_guard_window))
        if d is not None:
            out.append(d)
    return out


# ---------------------------------------------------------------------------
# Equivalence
# ---------------------------------------------------------------------------

def sweeps_equivalent(s1: SweepState, s2: SweepState, samples: int = 10**4, seed: int = 0) -> bool:
    """Same area and identical membership on seeded random points."""
    from .classify import build_index

    if not (s1.maximal and s2.maximal):
        raise NotMaximal("both states must have empty queues")
    a1, a2 = s1.total_area, s2.total_area
    if abs(a1 - a2) > 1e-9 * max(abs(a1), abs(a2), 1e-300):
        return False
    b1, b2 = s1.curve.bbox, s2.curve.bbox
    lo = np.minimum([b1.min.x, b1.min.y], [b2.min.x, b2.min.y])
    hi = np.maximum([b1.max.x, b1.max.y], [b2.max.x, b2.max.y])
    rng = np.random.default_rng(seed)
    pts = lo + (hi - lo) * rng.random((samples, 2))
    tol = max(s1.curve.eps, s2.curve.eps)
    keep = (s1.curve.distance(pts) > tol) & (s2.curve.distance(pts) > tol)
    pts = pts[keep]
    m1 = build_index(s1).locate(pts) >= 0
    m2 = build_index(s2).locate(pts) >= 0
    return bool(np.array_equal(m1, m2))


# ---------------------------------------------------------------------------
# Inversion and the exterior
# ---------------------------------------------------------------------------

def _invert(points: np.ndarray, c: np.ndarray) -> np.ndarray:
    d = points - c
    return d / np.einsum("ij,ij->i", d, d)[:, None]


def _sample_image(curve: ClosedPolyline, c: np.ndarray, samples_per_edge: int, tol: float) -> np.ndarray:
    v = curve.vertices
    n = len(v)
    a = np.repeat(np.arange(n), samples_per_edge)
    u0 = np.tile(np.arange(samples_per_edge) / samples_per_edge, n)
    u1 = u0 + 1.0 / samples_per_edge
    done_e, done_u = [], []
    w = np.roll(v, -1, axis=0)
    for _ in range(40):
        p0 = v[a] + (w[a] - v[a]) * u0[:, None]
        p1 = v[a] + (w[a] - v[a]) * u1[:, None]
        pm = 0.5 * (p0 + p1)
        i0, i1, im = _invert(p0, c), _invert(p1, c), _invert(pm, c)
        dev_img = np.hypot(*(im - 0.5 * (i0 + i1)).T)
        # deviation measured back in the curve's own coordinates
        dev = dev_img * np.einsum("ij,ij->i", pm - c, pm - c)
        ok = dev <= tol
        done_e.append(a[ok])
        done_u.append(u0[ok])
        if ok.all():
            break
        a, u0, u1 = a[~ok], u0[~ok], u1[~ok]
        um = 0.5 * (u0 + u1)
        a = np.concatenate([a, a])
        u0, u1 = np.concatenate([u0, um]), np.concatenate([um, u1])
    else:
        done_e.append(a)
        done_u.append(u0)
    e = np.concatenate(done_e)
    u = np.concatenate(done_u)
    order = np.lexsort((u, e))
    e, u = e[order], u[order]
    pts = v[e] + (w[e] - v[e]) * u[:, None]
    return _invert(pts, c)


def invert_curve(curve: ClosedPolyline, center: Sequence[float], samples_per_edge: int = 8,
                 tol: float | None = None, refinements: int = 5) -> ClosedPolyline:
    """Image of the curve under inversion in the unit circle about ``center``.

    Edges map to circular arcs, which are sampled adaptively until the chord
    error, measured in the original coordinates, is below ``tol`` (default
    ``1e-4`` times the bounding-box diagonal).  A self-intersecting image is
    resampled more finely before giving up.
    """
    c = np.asarray(center, dtype=float)
    if float(curve.distance([c])[0]) <= 10 * curve.eps:
        raise CenterOnCurve(f"center {tuple(c)} is within tolerance of the curve")
    if tol is None:
        tol = 1e-4 * curve.bbox.diagonal
    last: Exception | None = None
    for _ in range(refinements + 1):
        img = _sample_image(curve, c, max(1, samples_per_edge), tol)
        try:
            return ClosedPolyline(img)
        except CurveError as exc:
            last = exc
            tol /= 4
    raise NonSimpleImage(f"inverted curve is not simple after refinement: {last}")


def exterior_sweep(curve: ClosedPolyline, p_star: Sequence[float], policy: EnginePolicy | None = None,
                   samples_per_edge: int = 8, tol: float | None = None) -> SweepState:
    """Maximal sweep of the inverted curve; its interior is the image of the exterior."""
    image = invert_curve(curve, p_star, samples_per_edge, tol)
    state = run_sweep(image, None, policy)
    state.inversion_center = Point2(float(p_star[0]), float(p_star[1]))
    return state
