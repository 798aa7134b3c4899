"""Sweepline construction of the interior of a closed polyline.

Starting from one free horizontal segment, the package grows the swept
region by horizontal sweeps spliced along its free vertical boundary pieces
until no extendable piece remains.  The result is a set of disjoint
trapezoids covering the interior, which supports point classification,
area measurement and rectilinear interior paths.
"""

from __future__ import annotations

from .classify import (
    Classification,
    RectilinearPath,
    SlabIndex,
    Verdict,
    build_index,
    classify_point,
    classify_points,
    connectivity_path,
    interior_area,
)
from .curve import (
    BoundingBox,
    ClosedPolyline,
    Hit,
    HitKind,
    Point2,
    horizontal_line_hits,
    koch_generate,
    load_curve,
    read_curve,
    regular_ngon,
    remove_degeneracy,
    vertical_line_hits,
)
from .engine import (
    EnginePolicy,
    Order,
    RayDiagnostic,
    SweepNode,
    SweepState,
    exterior_sweep,
    find_root_point,
    find_root_point_with_method,
    invert_curve,
    ray_guard,
    run_sweep,
    start_state,
    step,
    sweeps_equivalent,
)
from .frontier import (
    ExtensionSite,
    FrontierBoundary,
    propose_extension_segment,
    select_extension_site,
    splice,
    validate_boundary,
)
from .segment import EndKind, HorizontalFreeSegment, OpenSegment, horizontal_segment_at, open_segment_at
from .sweep import (
    CurveArc,
    Discontinuity,
    EndVertical,
    Facing,
    FreeVertical,
    HorizontalSweep,
    Profile,
    Trapezoid,
    build_sweep,
    compute_profiles,
    detect_discontinuities,
)

__all__ = [name for name in dir() if not name.startswith("_") and name != "annotations"]
