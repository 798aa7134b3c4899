"""Write-only SVG snapshots of a sweep in progress."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

from .segment import HorizontalFreeSegment

if TYPE_CHECKING:
    from .engine import SweepState


def _fmt(v: float) -> str:
    return f"{v:.9g}"


def render_state(state: "SweepState", current: HorizontalFreeSegment | None = None,
                 size: int = 800, title: str | None = None) -> str:
    """SVG text: curve in black, trapezoids filled, free verticals red, ``current`` blue."""
    bb = state.curve.bbox
    pad = 0.05 * max(bb.width, bb.height)
    x0, y0 = bb.min.x - pad, bb.min.y - pad
    w, h = bb.width + 2 * pad, bb.height + 2 * pad
    scale = size / max(w, h)
    stroke = 1.5 / scale

    def pt(x: float, y: float) -> str:
        # flip y so the picture is upright
        return f"{_fmt(x)},{_fmt(y0 + h - (y - y0))}"

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w * scale)}" height="{_fmt(h * scale)}" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">',
    ]
    if title:
        parts.append(f"<title>{title.replace('&', '&amp;').replace('<', '&lt;')}</title>")
    parts.append(f'<g fill="#9ecae1" fill-opacity="0.6" stroke="#3182bd" stroke-width="{_fmt(stroke / 3)}">')
    for _, tr in state.trapezoids:
        poly = " ".join([pt(tr.x_left, tr.bottom_left), pt(tr.x_right, tr.bottom_right),
                         pt(tr.x_right, tr.top_right), pt(tr.x_left, tr.top_left)])
        parts.append(f'<polygon points="{poly}"/>')
    parts.append("</g>")
    curve_pts = " ".join(pt(x, y) for x, y in state.curve.vertices.tolist())
    parts.append(f'<polygon points="{curve_pts}" fill="none" stroke="black" stroke-width="{_fmt(stroke)}"/>')
    parts.append(f'<g stroke="red" stroke-width="{_fmt(stroke * 1.5)}">')
    for fv in state.frontier.vertical_index.values():
        parts.append(f'<line x1="{_fmt(fv.x)}" y1="{pt(fv.x, fv.y_lo).split(",")[1]}" '
                     f'x2="{_fmt(fv.x)}" y2="{pt(fv.x, fv.y_hi).split(",")[1]}"/>')
    parts.append("</g>")
    if current is not None and current.finite:
        yy = pt(current.x_left, current.y).split(",")[1]
        parts.append(f'<line x1="{_fmt(current.x_left)}" y1="{yy}" x2="{_fmt(current.x_right)}" y2="{yy}" '
                     f'stroke="blue" stroke-width="{_fmt(stroke * 1.5)}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_frame(path: str | Path, state: "SweepState", current: HorizontalFreeSegment | None = None) -> None:
    Path(path).write_text(render_state(state, current, title=f"step {state.step_count}"))

