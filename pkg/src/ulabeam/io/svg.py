"""Dependency-free SVG 1.1 plots: beam-pattern overlay and metric heatmap.

Output is a pure function of the input (fixed number formatting, no
timestamps or random ids), so identical inputs give identical bytes.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from ..beamformer import BeamPattern
from ..errors import ShapeError, ValidationError
from ..metrics import HeatmapGrid

THEORY_COLOR = "#1f3fbf"
EXPERIMENT_COLOR = "#17becf"
SOURCE_COLOR = "#000000"
FAILED_COLOR = "#bdbdbd"
# purple (low) -> red (high), lightness roughly increasing
PALETTE = ("#2c0a5e", "#5b1689", "#8c2286", "#bd2c6c", "#e03a46", "#f0231c")


def _f(x: float) -> str:
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _header(width, height, title):
    return [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]


def colormap(t: float) -> str:
    """Hex colour for ``t`` in [0, 1] on the purple-to-red palette."""
    t = min(max(float(t), 0.0), 1.0)
    pos = t * (len(PALETTE) - 1)
    i = min(int(pos), len(PALETTE) - 2)
    u = pos - i
    a = [int(PALETTE[i][k:k + 2], 16) for k in (1, 3, 5)]
    b = [int(PALETTE[i + 1][k:k + 2], 16) for k in (1, 3, 5)]
    return "#" + "".join(f"{round(x + (y - x) * u):02x}" for x, y in zip(a, b))


def emit_beam_pattern_svg(
    theoretical: BeamPattern,
    experimental: BeamPattern,
    true_azimuth: float,
    title: str | None = None,
) -> str:
    """Rectangular overlay of two normalized patterns with a source-angle marker."""
    if theoretical.grid != experimental.grid:
        raise ShapeError("beam patterns are on different steering grids")
    W, H = 760, 440
    left, right, top, bottom = 60, 170, 40, 50
    pw, ph = W - left - right, H - top - bottom
    x = lambda a: left + pw * a / 360.0
    y = lambda v: top + ph * (1.0 - v)
    if title is None:
        f = theoretical.frequency_hz
        title = f"Beam pattern, source {true_azimuth:g} deg" + (f", {f:g} Hz" if f is not None else "")

    out = _header(W, H, title)
    out.append(f'<text x="{left + pw / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append('<g id="axes" stroke="#000000" fill="none">')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}"/>')
    out.append("</g>")
    out.append('<g id="ticks" fill="#000000">')
    for a in range(0, 361, 45):
        out.append(f'<line x1="{_f(x(a))}" y1="{top + ph}" x2="{_f(x(a))}" y2="{top + ph + 5}" stroke="#000000"/>')
        out.append(f'<text x="{_f(x(a))}" y="{top + ph + 18}" text-anchor="middle">{a}</text>')
    for k in range(6):
        v = k / 5
        out.append(f'<line x1="{left - 5}" y1="{_f(y(v))}" x2="{left}" y2="{_f(y(v))}" stroke="#000000"/>')
        out.append(f'<text x="{left - 8}" y="{_f(y(v) + 4)}" text-anchor="end">{v:.1f}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{H - 12}" text-anchor="middle">Steering angle (deg)</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2})">Normalised power</text>'
    )
    out.append("</g>")

    def polyline(p: BeamPattern):
        return " ".join(f"{_f(x(a))},{_f(y(v))}" for a, v in zip(p.angles_deg, p.values))

    out.append(f'<g id="theoretical"><polyline points="{polyline(theoretical)}" fill="none" '
               f'stroke="{THEORY_COLOR}" stroke-width="2"/></g>')
    out.append(f'<g id="experimental"><polyline points="{polyline(experimental)}" fill="none" '
               f'stroke="{EXPERIMENT_COLOR}" stroke-width="2" stroke-dasharray="3,3"/></g>')
    xs = _f(x(float(np.mod(true_azimuth, 360.0))))
    out.append(f'<g id="source-angle"><line x1="{xs}" y1="{top}" x2="{xs}" y2="{top + ph}" '
               f'stroke="{SOURCE_COLOR}" stroke-width="2"/></g>')

    lx, ly = left + pw + 15, top + 10
    out.append('<g id="legend">')
    for i, (label, color, dash) in enumerate((
        ("Theoretical", THEORY_COLOR, ""),
        ("Experimental", EXPERIMENT_COLOR, ' stroke-dasharray="3,3"'),
        ("Source angle", SOURCE_COLOR, ""),
    )):
        yy = ly + 20 * i
        out.append(f'<line x1="{lx}" y1="{yy}" x2="{lx + 25}" y2="{yy}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 32}" y="{yy + 4}">{label}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


METRIC_LABELS = {
    "area_difference": "Normalised area difference",
    "rmse_percent": "RMSE (%)",
    "peak_delta_deg": "Peak angle difference (deg)",
}


def emit_heatmap_svg(grid: HeatmapGrid, metric: str = "area_difference", title: str | None = None) -> str:
    """Array angle (rows) x frequency (columns) grid coloured min=purple, max=red."""
    if metric not in METRIC_LABELS:
        raise ValidationError(f"unknown metric {metric!r}")
    vals = grid.metric(metric)
    n_a, n_f = vals.shape
    finite = vals[np.isfinite(vals)]
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 0.0)
    span = hi - lo

    cw, ch = max(8, min(40, 780 // n_f)), max(8, min(30, 540 // n_a))
    left, top, bottom = 70, 40, 60
    pw, ph = cw * n_f, ch * n_a
    bar_x = left + pw + 30
    W, H = bar_x + 110, top + ph + bottom
    title = title or f"{METRIC_LABELS[metric]} by array angle and frequency"

    out = _header(W, H, title)
    out.append(f'<text x="{left + pw / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append('<g id="cells" stroke="none">')
    for i in range(n_a):
        for j in range(n_f):
            v = vals[i, j]
            if math.isfinite(v):
                color = colormap((v - lo) / span if span > 0 else 0.0)
                cls = "cell"
            else:
                color, cls = FAILED_COLOR, "cell failed"
            out.append(f'<rect class="{cls}" x="{left + j * cw}" y="{top + i * ch}" width="{cw}" '
                       f'height="{ch}" fill="{color}"/>')
    out.append("</g>")

    out.append('<g id="axes" fill="#000000">')
    label_every_f = max(1, math.ceil(n_f / 13))
    for j, f in enumerate(grid.frequencies_hz):
        if j % label_every_f == 0:
            cx = left + (j + 0.5) * cw
            out.append(f'<text x="{_f(cx)}" y="{top + ph + 15}" text-anchor="end" '
                       f'transform="rotate(-45 {_f(cx)} {top + ph + 15})">{f:g}</text>')
    label_every_a = max(1, math.ceil(n_a / 18))
    for i, a in enumerate(grid.array_angles_deg):
        if i % label_every_a == 0:
            out.append(f'<text x="{left - 6}" y="{_f(top + (i + 0.5) * ch + 4)}" text-anchor="end">{a:g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{H - 8}" text-anchor="middle">Frequency (Hz)</text>')
    out.append(f'<text x="16" y="{top + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {top + ph / 2})">Array angle (deg)</text>')
    out.append("</g>")

    out.append('<g id="colorbar">')
    out.append('<defs><linearGradient id="colorbar-gradient" x1="0" y1="1" x2="0" y2="0">')
    for k in range(len(PALETTE)):
        t = k / (len(PALETTE) - 1)
        out.append(f'<stop offset="{_f(t)}" stop-color="{PALETTE[k]}"/>')
    out.append("</linearGradient></defs>")
    out.append(f'<rect x="{bar_x}" y="{top}" width="20" height="{ph}" fill="url(#colorbar-gradient)" stroke="#000000"/>')
    out.append(f'<text x="{bar_x + 26}" y="{top + 10}">{hi:.3g}</text>')
    out.append(f'<text x="{bar_x + 26}" y="{top + ph}">{lo:.3g}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
