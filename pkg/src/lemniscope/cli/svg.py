"""SVG 1.1 drawing of a critical graph with optional level curves."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from ..oracle import Window

SIZE = 800
PALETTE = {
    "graph": "#1f3a93",
    "level": "#c0392b",
    "zero": "#27ae60",
    "pole": "#8e44ad",
    "critical": "#e67e22",
    "frame": "#888888",
}


class _Canvas:
    def __init__(self, window: Window):
        self.w = window
        self.sx = SIZE / window.width
        self.sy = SIZE / (window.ymax - window.ymin)

    def xy(self, z: complex) -> tuple[float, float]:
        return (z.real - self.w.xmin) * self.sx, (self.w.ymax - z.imag) * self.sy

    def path(self, pts) -> str:
        return " ".join("%.3f,%.3f" % self.xy(z) for z in pts)


def render_svg(r, qd, graph, config, levels: dict[float, list[np.ndarray]], window: Window, caption: str) -> str:
    cv = _Canvas(window)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}" data-vertices="{len(graph.vertices)}" data-edges="{len(graph.edges)}" '
        f'data-components="{len(graph.components)}" data-circle-faces="{config.circle_count}" '
        f'data-ring-faces="{config.ring_count}">',
        f"<title>{escape(caption)}</title>",
        '<defs><clipPath id="frame"><rect x="0" y="0" width="%d" height="%d"/></clipPath></defs>' % (SIZE, SIZE),
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white" stroke="{PALETTE["frame"]}"/>',
        '<g clip-path="url(#frame)" fill="none">',
    ]
    for i, e in enumerate(graph.edges):
        pts = e.trajectory.points
        if len(pts) > 1:
            out.append(f'<polyline class="edge" data-edge="{i}" stroke="{PALETTE["graph"]}" stroke-width="1.5" '
                       f'points="{cv.path(pts)}"/>')
    for c in sorted(levels):
        for pts in levels[c]:
            out.append(f'<polyline class="level" data-level="{c!r}" stroke="{PALETTE["level"]}" stroke-width="1" '
                       f'stroke-dasharray="6 4" points="{cv.path(np.append(pts, pts[:1]))}"/>')
    out.append("</g>")
    for z in qd.finite_zeros:
        x, y = cv.xy(z.location)
        out.append(f'<rect class="critical" x="{x - 3:.3f}" y="{y - 3:.3f}" width="6" height="6" '
                   f'fill="{PALETTE["critical"]}"/>')
    for z, _ in (r.zeros() or []):
        x, y = cv.xy(z)
        out.append(f'<circle class="zero" cx="{x:.3f}" cy="{y:.3f}" r="4" fill="{PALETTE["zero"]}"/>')
    for z, _ in (r.poles() or []):
        x, y = cv.xy(z)
        out.append(f'<path class="pole" d="M{x - 4:.3f},{y - 4:.3f}L{x + 4:.3f},{y + 4:.3f}M{x - 4:.3f},{y + 4:.3f}'
                   f'L{x + 4:.3f},{y - 4:.3f}" stroke="{PALETTE["pole"]}" stroke-width="2"/>')
    out.append(f'<text x="8" y="{SIZE - 10}" font-family="monospace" font-size="13" fill="#333">{escape(caption)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
