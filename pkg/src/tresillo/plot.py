"""Standalone SVG line chart of a weekly trend with its confidence band."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 40
MARGIN_BOTTOM = 50
N_YTICKS = 5


@dataclass
class PlotSpec:
    series: list = field(default_factory=list)   # TrendPoint-like: week, mean, ci_lower, ci_upper
    band: bool = True
    title: str = "Tresillo similarity"
    width_px: int = 1000
    height_px: int = 400
    y_label: str = "similarity"
    overlay: list | None = None                   # optional [(week, value)] line, e.g. rolling mean

    def __post_init__(self):
        if self.width_px < 100 or self.height_px < 100:
            raise ValueError("plot must be at least 100x100 pixels")


def _fmt(x):
    return f"{x:.2f}"


def render_svg(spec: PlotSpec) -> str:
    pts = list(spec.series)
    if not pts:
        raise ValueError("nothing to plot")
    w, h = spec.width_px, spec.height_px
    x0, x1 = MARGIN_LEFT, w - MARGIN_RIGHT
    y0, y1 = h - MARGIN_BOTTOM, MARGIN_TOP

    days = [p.week.toordinal() for p in pts]
    dmin, dmax = min(days), max(days)
    lows = [p.ci_lower if spec.band else p.mean for p in pts]
    highs = [p.ci_upper if spec.band else p.mean for p in pts]
    if spec.overlay:
        lows += [v for _, v in spec.overlay]
        highs += [v for _, v in spec.overlay]
    vmin, vmax = min(lows), max(highs)
    pad = 0.05 * (vmax - vmin) if vmax > vmin else 0.05
    vmin, vmax = vmin - pad, vmax + pad

    def sx(day):
        if dmax == dmin:
            return (x0 + x1) / 2
        return x0 + (day - dmin) / (dmax - dmin) * (x1 - x0)

    def sy(v):
        return y0 - (v - vmin) / (vmax - vmin) * (y0 - y1)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
        f'<text x="{w / 2:.1f}" y="{MARGIN_TOP / 2 + 5:.1f}" text-anchor="middle" '
        f'font-size="16">{escape(spec.title)}</text>',
    ]

    # axes
    out.append(f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    for k in range(N_YTICKS):
        v = vmin + (vmax - vmin) * k / (N_YTICKS - 1)
        y = sy(v)
        out.append(f'<line x1="{x0 - 5}" y1="{_fmt(y)}" x2="{x0}" y2="{_fmt(y)}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{_fmt(y + 4)}" text-anchor="end">{v:.3f}</text>')
    for label_day in _date_ticks(dmin, dmax):
        x = sx(label_day)
        label = dt.date.fromordinal(label_day).isoformat()
        out.append(f'<line x1="{_fmt(x)}" y1="{y0}" x2="{_fmt(x)}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{y0 + 20}" text-anchor="middle">{label}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{h - 10}" text-anchor="middle">chart week</text>')
    out.append(f'<text x="18" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {(y0 + y1) / 2:.1f})">{escape(spec.y_label)}</text>')

    if spec.band:
        upper = [f"{_fmt(sx(d))},{_fmt(sy(p.ci_upper))}" for d, p in zip(days, pts)]
        lower = [f"{_fmt(sx(d))},{_fmt(sy(p.ci_lower))}" for d, p in zip(days, pts)]
        poly = " ".join(upper + lower[::-1])
        out.append(f'<polygon class="ci-band" points="{poly}" fill="lightblue" '
                   f'fill-opacity="0.5" stroke="none"/>')

    line = " ".join(f"{_fmt(sx(d))},{_fmt(sy(p.mean))}" for d, p in zip(days, pts))
    out.append(f'<polyline class="mean" points="{line}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
    if spec.overlay:
        ov = " ".join(f"{_fmt(sx(wk.toordinal()))},{_fmt(sy(v))}" for wk, v in spec.overlay)
        out.append(f'<polyline class="overlay" points="{ov}" fill="none" stroke="darkred" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _date_ticks(dmin, dmax, n=6):
    if dmax == dmin:
        return [dmin]
    return [round(dmin + (dmax - dmin) * k / (n - 1)) for k in range(n)]


def write_svg(spec: PlotSpec, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_svg(spec))
