"""Deterministic SVG rendering of consensus layouts and single tablecloths.

Edge force f in [0, 1] maps linearly to stroke width and opacity, weak edges
are drawn first so strong ones sit on top, and a vertical gradient legend
translates the visual ramp back to "% of tablecloths".  Input coordinates are
y-up (measured from the bottom-left sheet corner); SVG is y-down, so the
vertical axis is flipped by the fit transform.  Output is plain SVG 1.1 with
no external references, byte-identical across runs for identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import EdgeSet, Tablecloth
from .layout import ConsensusLayout


@dataclass(frozen=True)
class RenderStyle:
    canvas_width: float = 880.0
    canvas_height: float = 620.0
    node_radius: float = 7.0
    font_size: float = 13.0
    stroke_min: float = 0.5  # px, force 0
    stroke_max: float = 6.0  # px, force 1
    opacity_min: float = 0.15
    opacity_max: float = 1.0
    legend_width: float = 16.0
    legend_height: float = 180.0
    margin_fraction: float = 0.10

    def __post_init__(self):
        if not self.stroke_min < self.stroke_max:
            raise ValueError("stroke_min must be < stroke_max")
        if not (0.0 <= self.opacity_min < self.opacity_max <= 1.0):
            raise ValueError("opacities must satisfy 0 <= min < max <= 1")

    def stroke_for(self, force: float) -> float:
        return self.stroke_min + (self.stroke_max - self.stroke_min) * force

    def opacity_for(self, force: float) -> float:
        return self.opacity_min + (self.opacity_max - self.opacity_min) * force


DEFAULT_STYLE = RenderStyle()

_LEGEND_GUTTER = 90.0  # canvas strip reserved for the gradient legend


def _fmt(value: float) -> str:
    return f"{value:.3f}".rstrip("0").rstrip(".")


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def _fit_transform(points: np.ndarray, style: RenderStyle, reserve_legend: bool):
    """Uniform scale + translation mapping y-up data into the y-down canvas,
    with a margin, preserving aspect ratio."""
    width = style.canvas_width - (_LEGEND_GUTTER if reserve_legend else 0.0)
    height = style.canvas_height
    margin = style.margin_fraction * min(width, height)
    span_x = float(points[:, 0].max() - points[:, 0].min()) if len(points) else 0.0
    span_y = float(points[:, 1].max() - points[:, 1].min()) if len(points) else 0.0
    usable_w = width - 2.0 * margin
    usable_h = height - 2.0 * margin
    if span_x > 0 or span_y > 0:
        scale = min(
            usable_w / span_x if span_x > 0 else float("inf"),
            usable_h / span_y if span_y > 0 else float("inf"),
        )
    else:
        scale = 1.0
    cx = float(points[:, 0].min() + points[:, 0].max()) / 2.0 if len(points) else 0.0
    cy = float(points[:, 1].min() + points[:, 1].max()) / 2.0 if len(points) else 0.0

    def to_canvas(p) -> tuple[float, float]:
        x = width / 2.0 + (float(p[0]) - cx) * scale
        y = height / 2.0 - (float(p[1]) - cy) * scale  # flip y
        return x, y

    return to_canvas, scale


def _svg_open(style: RenderStyle, defs: str = "") -> list[str]:
    w, h = _fmt(style.canvas_width), _fmt(style.canvas_height)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>',
    ]
    if defs:
        parts.append(defs)
    return parts


def _legend(style: RenderStyle) -> str:
    x = style.canvas_width - _LEGEND_GUTTER + 18.0
    y0 = (style.canvas_height - style.legend_height) / 2.0
    w = style.legend_width
    h = style.legend_height
    tx = x + w + 6.0
    fs = style.font_size - 2.0
    return "".join(
        [
            "<defs>",
            '<linearGradient id="forceramp" x1="0" y1="1" x2="0" y2="0">',
            f'<stop offset="0" stop-color="#000000" stop-opacity="{_fmt(style.opacity_min)}"/>',
            f'<stop offset="1" stop-color="#000000" stop-opacity="{_fmt(style.opacity_max)}"/>',
            "</linearGradient>",
            "</defs>",
            f'<g font-size="{_fmt(fs)}" fill="#333333">',
            f'<rect x="{_fmt(x)}" y="{_fmt(y0)}" width="{_fmt(w)}" height="{_fmt(h)}" '
            'fill="url(#forceramp)" stroke="#333333" stroke-width="0.5"/>',
            f'<text x="{_fmt(tx)}" y="{_fmt(y0 + 4.0)}">100%</text>',
            f'<text x="{_fmt(tx)}" y="{_fmt(y0 + h / 2.0 + 4.0)}">50%</text>',
            f'<text x="{_fmt(tx)}" y="{_fmt(y0 + h + 4.0)}">0%</text>',
            f'<text x="{_fmt(x - 6.0)}" y="{_fmt(y0 - 12.0)}">% of tablecloths</text>',
            "</g>",
        ]
    )


def _node_markup(x: float, y: float, label: str, style: RenderStyle) -> str:
    return (
        f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(style.node_radius)}" '
        'fill="#ffffff" stroke="#222222" stroke-width="1.5"/>'
        f'<text x="{_fmt(x + style.node_radius + 4.0)}" y="{_fmt(y + style.font_size / 3.0)}" '
        f'font-size="{_fmt(style.font_size)}" fill="#111111">{_escape(label)}</text>'
    )


def render_consensus(
    layout: ConsensusLayout,
    sample_names: Sequence[str],
    style: RenderStyle | None = None,
) -> bytes:
    """Consensus graphic: positioned samples, force-encoded edges, legend."""
    style = style or DEFAULT_STYLE
    pos = np.asarray(layout.positions, dtype=np.float64)
    n = pos.shape[0]
    if len(sample_names) != n:
        raise ValueError("sample_names length must match layout positions")
    if not np.all(np.isfinite(pos)):
        raise ValueError("layout positions must be finite")
    to_canvas, _ = _fit_transform(pos, style, reserve_legend=True)

    parts = _svg_open(style)
    parts.append(_legend(style))

    if layout.forces is not None:
        drawn = []
        forces = layout.forces.forces
        for i in range(n):
            for j in range(i + 1, n):
                f = float(forces[i, j])
                if f > 0.0:
                    drawn.append((f, i, j))
        drawn.sort()  # ascending force: strong edges drawn last, on top
        edge_markup = []
        for f, i, j in drawn:
            x1, y1 = to_canvas(pos[i])
            x2, y2 = to_canvas(pos[j])
            edge_markup.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
                f'stroke="#000000" stroke-width="{_fmt(style.stroke_for(f))}" '
                f'stroke-opacity="{_fmt(style.opacity_for(f))}" stroke-linecap="round"/>'
            )
        parts.append("<g>" + "".join(edge_markup) + "</g>")

    node_markup = []
    for i in range(n):
        x, y = to_canvas(pos[i])
        node_markup.append(_node_markup(x, y, str(sample_names[i]), style))
    parts.append("<g>" + "".join(node_markup) + "</g>")
    parts.append("</svg>")
    return "\n".join(parts).encode("utf-8")


def render_tablecloth(
    tablecloth: Tablecloth,
    graph: EdgeSet,
    style: RenderStyle | None = None,
    sample_names: Sequence[str] | None = None,
) -> bytes:
    """Inspection view of one tablecloth: sheet outline, measured positions,
    and its Gabriel edges drawn uniformly."""
    style = style or DEFAULT_STYLE
    pos = tablecloth.positions
    n = pos.shape[0]
    if graph.sample_count != n:
        raise ValueError("graph does not match tablecloth sample count")
    if sample_names is None:
        sample_names = [str(i + 1) for i in range(n)]
    sheet = tablecloth.sheet
    corners = np.array(
        [[0.0, 0.0], [sheet.width, 0.0], [sheet.width, sheet.height], [0.0, sheet.height]]
    )
    frame = np.vstack([corners, pos]) if n else corners
    to_canvas, _ = _fit_transform(frame, style, reserve_legend=False)

    parts = _svg_open(style)
    x0, y0 = to_canvas(corners[3])  # top-left corner in canvas terms
    x1, y1 = to_canvas(corners[1])
    parts.append(
        f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(x1 - x0)}" height="{_fmt(y1 - y0)}" '
        'fill="none" stroke="#888888" stroke-width="1"/>'
    )
    edge_markup = []
    for i, j in graph.sorted_edges():
        xa, ya = to_canvas(pos[i])
        xb, yb = to_canvas(pos[j])
        edge_markup.append(
            f'<line x1="{_fmt(xa)}" y1="{_fmt(ya)}" x2="{_fmt(xb)}" y2="{_fmt(yb)}" '
            'stroke="#000000" stroke-width="1.5" stroke-opacity="0.8"/>'
        )
    parts.append("<g>" + "".join(edge_markup) + "</g>")
    node_markup = []
    for i in range(n):
        x, y = to_canvas(pos[i])
        node_markup.append(_node_markup(x, y, str(sample_names[i]), style))
    parts.append("<g>" + "".join(node_markup) + "</g>")
    parts.append("</svg>")
    return "\n".join(parts).encode("utf-8")
