"""Grow the interior of a Koch snowflake one sweep at a time.

Prints how the swept area approaches the polygon area and writes a few SVG
frames of the growing region to ``demos/out/``.

    python demos/grow_koch.py [level]
"""

from __future__ import annotations

import sys
from pathlib import Path

from jordansweep import koch_generate, run_sweep
from jordansweep.oracle import shoelace_area
from jordansweep.svg import write_frame


def main(level: int = 3) -> None:
    curve = koch_generate(level)
    target = shoelace_area(curve.vertices)
    out = Path(__file__).parent / "out"
    out.mkdir(exist_ok=True)
    checkpoints = {1, 2, 5, 10, 25, 50, 100}

    def observer(state, node):
        if state.step_count in checkpoints:
            write_frame(out / f"koch{level}_step{state.step_count:03d}.svg", state, node.t)
            print(f"step {state.step_count:4d}: swept {state.total_area / target:8.4%} of the area")

    state = run_sweep(curve, observer=observer)
    write_frame(out / f"koch{level}_final.svg", state)
    print(f"finished after {state.step_count} sweeps; area {state.total_area:.12f} vs {target:.12f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
