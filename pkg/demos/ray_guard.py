"""Show the guard against extension chains that stop making progress.

Capping every extension at half its room, and always extending the newest
piece first, makes the sweeps on a unit square creep towards a wall.  The
guard notices the contracting chain, lifts the cap and the run still covers
the whole square.

    python demos/ray_guard.py
"""

from __future__ import annotations

from jordansweep import ClosedPolyline, EnginePolicy, Order, run_sweep


def main() -> None:
    square = ClosedPolyline([(0, 0), (1, 0), (1, 1), (0, 1)])
    state = run_sweep(square, None, EnginePolicy(order=Order.LIFO, cap_fraction=0.5))
    for d in state.ray_diagnostics:
        x, lo, hi = d.limiting_segment_estimate
        print(f"{d.verdict.value}: chain {d.chain}, limit near x={x:.6f}, y in [{lo:.4f}, {hi:.4f}]")
    print(f"{state.step_count} sweeps, area {state.total_area:.12f}")


if __name__ == "__main__":
    main()
