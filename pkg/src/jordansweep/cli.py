"""Command-line entry point: ``jordansweep {sweep,classify,area}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .classify import build_index, classify_points, read_points_csv, write_classifications_csv
from .curve import read_curve
from .engine import EnginePolicy, Order, SweepState, exterior_sweep, find_root_point_with_method, run_sweep
from .errors import GeometryError
from .svg import write_frame

POLICIES = {o.value: o for o in Order}


@dataclass(frozen=True)
class RunConfig:
    curve: Path
    policy: str = "largest"
    eps_min: float | None = None
    max_steps: int = 10**6
    seed: int = 0
    out: Path = Path(".")
    svg_every: int = 0

    def validate(self) -> None:
        if not self.curve.is_file():
            raise ValueError(f"curve file not found: {self.curve}")
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.eps_min is not None and not (math.isfinite(self.eps_min) and self.eps_min > 0):
            raise ValueError("--eps-min must be a positive number")
        if self.max_steps < 1:
            raise ValueError("--max-steps must be at least 1")
        if self.svg_every < 0:
            raise ValueError("--svg-every must be non-negative")

    def policy_object(self) -> EnginePolicy:
        return EnginePolicy(order=POLICIES[self.policy], eps_min=self.eps_min, max_steps=self.max_steps)


def _run(config: RunConfig) -> SweepState:
    curve = read_curve(config.curve)
    p_star, method = find_root_point_with_method(curve)
    frames = []
    observer = None
    if config.svg_every:
        config.out.mkdir(parents=True, exist_ok=True)

        def observer(state, node):
            if state.step_count % config.svg_every == 0:
                path = config.out / f"frame_{len(frames) + 1:04d}.svg"
                write_frame(path, state, node.t)
                frames.append(state.step_count)

    state = run_sweep(curve, p_star, config.policy_object(), observer)
    state.root_method = method
    if config.svg_every and (not frames or frames[-1] != state.step_count):
        write_frame(config.out / f"frame_{len(frames) + 1:04d}.svg", state)
    return state


def cmd_sweep(config: RunConfig) -> int:
    config.validate()
    state = _run(config)
    config.out.mkdir(parents=True, exist_ok=True)
    (config.out / "report.json").write_text(state.report_json() + "\n")
    print(f"steps={state.step_count} total_area={state.total_area:.12g} "
          f"frontier_remaining={len(state.frontier.vertical_index)}")
    return 2 if state.step_limit_reached else 0


def cmd_classify(config: RunConfig, points: Path) -> int:
    config.validate()
    pts = read_points_csv(points)
    state = _run(config)
    config.out.mkdir(parents=True, exist_ok=True)
    out_path = config.out / "classifications.csv"
    if len(pts) == 0:
        out_path.write_text("")
        return 0
    ext = exterior_sweep(state.curve, state.root_point)
    results = classify_points(build_index(state), state.curve, pts, ext)
    write_classifications_csv(out_path, pts, results)
    for (x, y), r in zip(pts, results):
        print(f"{float(x)!r},{float(y)!r},{r.verdict.value},{r.distance_hint:.12g}")
    return 2 if state.step_limit_reached else 0


def cmd_area(config: RunConfig) -> int:
    config.validate()
    state = _run(config)
    print(format(state.total_area, "#.12g"))
    return 2 if state.step_limit_reached else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jordansweep", description="Sweepline interiors of closed polylines.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("sweep", "run a maximal sweep and write report.json"),
                           ("classify", "classify points from a CSV file"),
                           ("area", "print the swept interior area")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--curve", required=True, type=Path, help="curve JSON file")
        p.add_argument("--policy", default="largest", choices=sorted(POLICIES))
        p.add_argument("--eps-min", type=float, default=None, help="minimum extendable frontier length")
        p.add_argument("--max-steps", type=int, default=10**6)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, default=Path("."))
        p.add_argument("--svg-every", type=int, default=0, help="write an SVG frame every K steps (0 = off)")
        if name == "classify":
            p.add_argument("--points", required=True, type=Path, help="CSV of x,y rows")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(curve=args.curve, policy=args.policy, eps_min=args.eps_min, max_steps=args.max_steps,
                       seed=args.seed, out=args.out, svg_every=args.svg_every)
    try:
        if args.command == "sweep":
            return cmd_sweep(config)
        if args.command == "classify":
            return cmd_classify(config, args.points)
        return cmd_area(config)
    except (ValueError, OSError, json.JSONDecodeError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
