"""Maximal free segments through a point: vertical ``s_p`` and horizontal ``t``."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .curve import ClosedPolyline, Hit, horizontal_line_hits, vertical_line_hits
from .errors import PointOnCurve


class EndKind(enum.Enum):
    ON_CURVE = "on_curve"
    INFINITE = "infinite"
    FREE = "free"


@dataclass(frozen=True)
class OpenSegment:
    """Vertical open segment ``{x} x (y_low, y_high)`` whose interior avoids the curve."""

    x: float
    y_low: float
    y_high: float
    low_kind: EndKind = EndKind.ON_CURVE
    high_kind: EndKind = EndKind.ON_CURVE

    @property
    def length(self) -> float:
        return self.y_high - self.y_low

    @property
    def finite(self) -> bool:
        return self.low_kind is EndKind.ON_CURVE and self.high_kind is EndKind.ON_CURVE

    def contains(self, y: float) -> bool:
        return self.y_low < y < self.y_high


@dataclass(frozen=True)
class HorizontalFreeSegment:
    """Horizontal segment at height ``y`` whose interior avoids the curve."""

    y: float
    x_left: float
    x_right: float
    left_kind: EndKind = EndKind.ON_CURVE
    right_kind: EndKind = EndKind.ON_CURVE

    @property
    def length(self) -> float:
        return self.x_right - self.x_left

    @property
    def finite(self) -> bool:
        return math.isfinite(self.x_left) and math.isfinite(self.x_right)

    def contains(self, x: float) -> bool:
        return self.x_left < x < self.x_right


def _bracket(hits: Sequence[Hit], c: float) -> tuple[float, float]:
    below = -math.inf
    above = math.inf
    for h in hits:
        if h.lo <= c <= h.hi:
            raise PointOnCurve(f"point lies on a curve feature at {h.lo}..{h.hi}")
        if h.hi < c:
            below = h.hi
        elif h.lo > c:
            above = h.lo
            break
    return below, above


def _kind(v: float) -> EndKind:
    return EndKind.ON_CURVE if math.isfinite(v) else EndKind.INFINITE


def _check_off_curve(curve: ClosedPolyline, p: Sequence[float]) -> None:
    d = float(curve.distance([p])[0])
    if d <= curve.eps:
        raise PointOnCurve(f"point {tuple(p)} is within {d:.3g} of the curve")


def open_segment_at(curve: ClosedPolyline, p: Sequence[float]) -> OpenSegment:
    """Maximal vertical free segment through ``p``.

    The upper end is the lowest curve hit above ``p`` and the lower end the
    highest hit below it; Touch hits terminate the segment like crossings.
    """
    x, y = float(p[0]), float(p[1])
    _check_off_curve(curve, (x, y))
    lo, hi = _bracket(vertical_line_hits(curve, x).hits, y)
    return OpenSegment(x, lo, hi, _kind(lo), _kind(hi))


def horizontal_segment_at(curve: ClosedPolyline, p: Sequence[float]) -> HorizontalFreeSegment:
    """Maximal horizontal free segment through ``p``."""
    x, y = float(p[0]), float(p[1])
    _check_off_curve(curve, (x, y))
    lo, hi = _bracket(horizontal_line_hits(curve, y).hits, x)
    return HorizontalFreeSegment(y, lo, hi, _kind(lo), _kind(hi))
