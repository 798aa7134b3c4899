"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class GeometryError(Exception):
    """Base class for all geometric failures raised by the package."""


class CurveError(GeometryError):
    """Invalid curve input."""


class NonSimpleCurve(CurveError):
    def __init__(self, first: int, second: int, message: str | None = None):
        self.edges = (first, second)
        super().__init__(message or f"edges {first} and {second} intersect")


class TooFewVertices(CurveError):
    pass


class DegenerateEdge(CurveError):
    pass


class LevelTooLarge(CurveError):
    pass


class PointOnCurve(GeometryError):
    pass


class SegmentTouchesCurve(GeometryError):
    pass


class EmptySegment(GeometryError):
    pass


class UnboundedSegment(GeometryError):
    """A free segment reached infinity where a finite one was required."""


class SegmentTooShort(GeometryError):
    pass


class NoRoom(GeometryError):
    pass


class SpliceMismatch(GeometryError):
    pass


class RootNotFound(GeometryError):
    pass


class QueueEmpty(GeometryError):
    pass


class NotMaximal(GeometryError):
    pass


class CenterOnCurve(GeometryError):
    pass


class NonSimpleImage(GeometryError):
    pass


class EmptyState(GeometryError):
    pass


class NotInterior(GeometryError):
    pass


class NoPath(GeometryError):
    pass
