"""Classify points against a C-shaped polygon and join two interior points.

The notch of the C is outside the polygon but inside its bounding box, so
the exterior verdict there comes from a sweep of the curve inverted about an
interior point.

    python demos/classify_and_connect.py
"""

from __future__ import annotations

from jordansweep import ClosedPolyline, build_index, classify_points, connectivity_path, exterior_sweep, run_sweep

C_SHAPE = [(0, 0), (3, 0), (3, 3), (0, 3), (0, 2), (2, 2), (2, 1), (0, 1)]


def main() -> None:
    curve = ClosedPolyline(C_SHAPE)
    state = run_sweep(curve)
    exterior = exterior_sweep(curve, state.root_point)
    points = [(1.5, 0.5), (1.5, 1.5), (2.0, 1.5), (4.0, 1.0), (2.5, 2.5)]
    for q, r in zip(points, classify_points(build_index(state), curve, points, exterior)):
        print(f"{q}: {r.verdict.value:9s} via {r.method:15s} distance {r.distance_hint:.3f}")

    path = connectivity_path(state, (0.5, 0.5), (0.5, 2.5))
    print(f"path with {path.turns} turns:")
    for w in path.waypoints:
        print(f"  ({w.x:.4f}, {w.y:.4f})")


if __name__ == "__main__":
    main()
