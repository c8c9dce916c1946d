"""Static SVG emitters for embeddings and barcodes.

Hand-rolled on purpose: every byte of the output is a pure function of the
input, so rerunning a plot command overwrites an identical artifact. Both
emitters produce standalone SVG documents with a white background, a thin
frame, and min/max labels; nothing is interactive.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import ValidationError
from .geometry import PointCloud
from .persistence import Bar

PALETTE = ("#33658a", "#c1292e", "#2a7221", "#8d5a97", "#b8860b")


def _color(dim: int) -> str:
    return PALETTE[dim % len(PALETTE)]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    return f"{v:.4g}"


def _document(width: float, height: float, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
    )
    background = f'<rect width="{_fmt(width)}" height="{_fmt(height)}" fill="#ffffff"/>'
    return "\n".join([head, background] + body + ["</svg>"]) + "\n"


def _frame(x0: float, y0: float, x1: float, y1: float) -> str:
    return (
        f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(x1 - x0)}" '
        f'height="{_fmt(y1 - y0)}" fill="none" stroke="#444444" stroke-width="1"/>'
    )


def _text(x: float, y: float, s: str, anchor: str = "middle") -> str:
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="sans-serif" font-size="11" '
        f'fill="#444444" text-anchor="{anchor}">{s}</text>'
    )


def _span(lo: float, hi: float) -> tuple[float, float]:
    if hi <= lo:
        pad = max(1.0, abs(lo))
        return lo - pad, lo + pad
    return lo, hi


def scatter_svg(
    cloud: PointCloud, width: float = 480.0, height: float = 480.0, point_radius: float = 3.0
) -> str:
    """Scatter of the first two coordinates, one circle element per row.

    One-dimensional clouds plot against a zero ordinate. Larger y is up.
    """
    margin = 42.0
    pts = cloud.points
    x = pts[:, 0]
    y = pts[:, 1] if cloud.dim >= 2 else np.zeros(cloud.n)
    x_lo, x_hi = _span(float(x.min()), float(x.max()))
    y_lo, y_hi = _span(float(y.min()), float(y.max()))
    inner_w = width - 2 * margin
    inner_h = height - 2 * margin

    body = [_frame(margin, margin, width - margin, height - margin)]
    for xi, yi in zip(x, y):
        cx = margin + (xi - x_lo) / (x_hi - x_lo) * inner_w
        cy = height - margin - (yi - y_lo) / (y_hi - y_lo) * inner_h
        body.append(
            f'<circle class="pt" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(point_radius)}" '
            f'fill="{PALETTE[0]}" fill-opacity="0.75"/>'
        )
    body.append(_text(margin, height - margin + 16, _label(x_lo), anchor="start"))
    body.append(_text(width - margin, height - margin + 16, _label(x_hi), anchor="end"))
    body.append(_text(margin - 6, height - margin, _label(y_lo), anchor="end"))
    body.append(_text(margin - 6, margin + 10, _label(y_hi), anchor="end"))
    return _document(width, height, body)


def _as_rows(bars: Iterable) -> list[tuple[int, float, float]]:
    rows = []
    for bar in bars:
        if isinstance(bar, Bar):
            rows.append((bar.dim, bar.birth, bar.death))
        else:
            dim, birth, death = bar
            rows.append((int(dim), float(birth), float(death)))
    for dim, birth, death in rows:
        if dim < 0 or not np.isfinite(birth) or birth > death:
            raise ValidationError(f"malformed bar ({dim}, {birth}, {death})")
    return sorted(rows)


def barcode_svg(bars: Iterable, width: float = 520.0, row_height: float = 12.0) -> str:
    """Horizontal interval diagram, one segment per bar, stacked by (dim, birth).

    Infinite bars are drawn dashed up to the right edge of the frame. An empty
    barcode still yields a framed, labeled axis.
    """
    margin = 42.0
    rows = _as_rows(bars)
    births = [b for _, b, _ in rows]
    deaths = [d for _, _, d in rows if np.isfinite(d)]
    lo = min([0.0] + births)
    hi = max(deaths + births) if (deaths or births) else 1.0
    lo, hi = _span(lo, hi)
    inner_h = max(row_height, len(rows) * row_height)
    height = 2 * margin + inner_h
    inner_w = width - 2 * margin

    def to_x(v: float) -> float:
        return margin + (v - lo) / (hi - lo) * inner_w

    body = [_frame(margin, margin, width - margin, margin + inner_h)]
    for i, (dim, birth, death) in enumerate(rows):
        y = margin + (i + 0.5) * row_height
        x0 = to_x(birth)
        if np.isfinite(death):
            x1 = to_x(death)
            dash = ""
        else:
            x1 = width - margin
            dash = ' stroke-dasharray="5,3"'
        body.append(
            f'<line class="bar" x1="{_fmt(x0)}" y1="{_fmt(y)}" x2="{_fmt(x1)}" '
            f'y2="{_fmt(y)}" stroke="{_color(dim)}" stroke-width="4"{dash}/>'
        )
    axis_y = margin + inner_h
    body.append(_text(margin, axis_y + 16, _label(lo), anchor="start"))
    body.append(_text(width - margin, axis_y + 16, _label(hi), anchor="end"))
    dims = sorted({dim for dim, _, _ in rows})
    for j, dim in enumerate(dims):
        x = margin + j * 64.0
        body.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(margin - 14)}" x2="{_fmt(x + 18)}" '
            f'y2="{_fmt(margin - 14)}" stroke="{_color(dim)}" stroke-width="4"/>'
        )
        body.append(_text(x + 24, margin - 10, f"H{dim}", anchor="start"))
    return _document(width, height, body)
