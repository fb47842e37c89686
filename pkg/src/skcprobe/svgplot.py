"""Minimal deterministic SVG line charts.

CSV is the ground truth for every experiment; these charts are a
convenience.  The writer emits plain SVG text with fixed geometry and
%.6g-formatted coordinates, so identical data yields identical bytes (no
timestamps, no font metrics, no library-version drift).
"""

from __future__ import annotations

import math
from typing import Sequence

WIDTH = 640
HEIGHT = 420
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 20
MARGIN_BOTTOM = 50

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _decade_ticks(lo: float, hi: float) -> list[float]:
    ticks = []
    e = math.floor(math.log10(lo) - 1e-9)
    while 10.0 ** e <= hi * (1 + 1e-9):
        if 10.0 ** e >= lo * (1 - 1e-9):
            ticks.append(10.0 ** e)
        e += 1
    return ticks or [lo, hi]


def line_chart(series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
               x_label: str, y_label: str, log_x: bool = False,
               title: str = "") -> str:
    """Render labeled (x, y) series to an SVG string.

    Each series is (label, xs, ys); a legend row is drawn per series.  With
    log_x the x axis uses decade ticks and positions points by log10(x).
    """
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    if not xs_all:
        raise ValueError("cannot plot empty series")
    if log_x and min(xs_all) <= 0:
        raise ValueError("log x-axis requires positive x values")

    def xt(x):
        return math.log10(x) if log_x else x

    x_lo, x_hi = min(map(xt, xs_all)), max(map(xt, xs_all))
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x):
        return MARGIN_LEFT + (xt(x) - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH // 2}" y="14" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="13">{title}</text>')

    axis_y = MARGIN_TOP + plot_h
    out.append(f'<line x1="{MARGIN_LEFT}" y1="{axis_y}" x2="{MARGIN_LEFT + plot_w}" '
               f'y2="{axis_y}" stroke="black"/>')
    out.append(f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" '
               f'y2="{axis_y}" stroke="black"/>')

    x_ticks = _decade_ticks(min(xs_all), max(xs_all)) if log_x \
        else _nice_ticks(x_lo, x_hi)
    for t in x_ticks:
        x = px(t) if log_x else MARGIN_LEFT + (t - x_lo) / (x_hi - x_lo) * plot_w
        label = _fmt(t)
        out.append(f'<line x1="{_fmt(x)}" y1="{axis_y}" x2="{_fmt(x)}" '
                   f'y2="{axis_y + 4}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{axis_y + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{label}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        y = py(t)
        out.append(f'<line x1="{MARGIN_LEFT - 4}" y1="{_fmt(y)}" x2="{MARGIN_LEFT}" '
                   f'y2="{_fmt(y)}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>')

    out.append(f'<text x="{MARGIN_LEFT + plot_w // 2}" y="{HEIGHT - 8}" '
               f'text-anchor="middle" font-family="sans-serif" font-size="12">'
               f'{x_label}</text>')
    out.append(f'<text x="16" y="{MARGIN_TOP + plot_h // 2}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 16 {MARGIN_TOP + plot_h // 2})">{y_label}</text>')

    for i, (label, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        points = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        out.append(f'<polyline points="{points}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        ly = MARGIN_TOP + 14 + 16 * i
        lx = MARGIN_LEFT + plot_w - 150
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{lx + 24}" y="{ly}" font-family="sans-serif" '
                   f'font-size="11">{label}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
