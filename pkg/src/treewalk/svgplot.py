"""Minimal native SVG emitters: line plots and heatmaps.

Just enough plotting (axes, ticks, legend, log scale, colorbar) to render
the sweep outputs without an external plotting dependency.  All emitters
return the SVG document as a string.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

__all__ = ["line_plot", "heatmap"]

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
_VIRIDIS = [
    (0.267, 0.005, 0.329),
    (0.283, 0.141, 0.458),
    (0.254, 0.265, 0.530),
    (0.207, 0.372, 0.553),
    (0.164, 0.471, 0.558),
    (0.128, 0.567, 0.551),
    (0.135, 0.659, 0.518),
    (0.267, 0.749, 0.441),
    (0.478, 0.821, 0.318),
    (0.741, 0.873, 0.150),
    (0.993, 0.906, 0.144),
]


def _color(x: float) -> str:
    x = min(max(x, 0.0), 1.0)
    pos = x * (len(_VIRIDIS) - 1)
    i = min(int(pos), len(_VIRIDIS) - 2)
    f = pos - i
    rgb = [
        (1 - f) * _VIRIDIS[i][c] + f * _VIRIDIS[i + 1][c] for c in range(3)
    ]
    return "#" + "".join(f"{int(round(255 * v)):02x}" for v in rgb)


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _fmt(x: float) -> str:
    if x == 0:
        return "0"
    if 1e-3 <= abs(x) < 1e4:
        s = f"{x:.4g}"
    else:
        s = f"{x:.2e}"
    return s


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class _Frame:
    """Axes frame mapping data coordinates to pixels."""

    def __init__(self, xlim, ylim, width=640, height=440, ylog=False, margin_r=20):
        self.margin_l, self.margin_r, self.margin_t, self.margin_b = 66, margin_r, 34, 46
        self.width, self.height = width, height
        self.ylog = ylog
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if ylog:
            self.y0 = math.log10(max(self.y0, 1e-300))
            self.y1 = math.log10(max(self.y1, 1e-300))
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0

    def px(self, x: float) -> float:
        inner = self.width - self.margin_l - self.margin_r
        return self.margin_l + (x - self.x0) / (self.x1 - self.x0) * inner

    def py(self, y: float) -> float:
        if self.ylog:
            y = math.log10(max(y, 1e-300))
        inner = self.height - self.margin_t - self.margin_b
        return self.height - self.margin_b - (y - self.y0) / (self.y1 - self.y0) * inner

    def axes_svg(self, xlabel: str, ylabel: str, title: str) -> list[str]:
        parts = [
            f'<rect x="{self.margin_l}" y="{self.margin_t}" '
            f'width="{self.width - self.margin_l - self.margin_r}" '
            f'height="{self.height - self.margin_t - self.margin_b}" '
            'fill="none" stroke="black"/>'
        ]
        for t in _nice_ticks(self.x0, self.x1):
            x = self.px(t)
            y = self.height - self.margin_b
            parts.append(f'<line x1="{x:.1f}" y1="{y}" x2="{x:.1f}" y2="{y + 5}" stroke="black"/>')
            parts.append(
                f'<text x="{x:.1f}" y="{y + 18}" font-size="11" text-anchor="middle">{_fmt(t)}</text>'
            )
        yticks = (
            [10.0**e for e in range(math.ceil(self.y0), math.floor(self.y1) + 1)]
            if self.ylog
            else _nice_ticks(self.y0, self.y1)
        )
        for t in yticks:
            y = self.py(t)
            x = self.margin_l
            parts.append(f'<line x1="{x - 5}" y1="{y:.1f}" x2="{x}" y2="{y:.1f}" stroke="black"/>')
            label = _fmt(t) if not self.ylog else f"1e{int(round(math.log10(t)))}"
            parts.append(
                f'<text x="{x - 8}" y="{y + 4:.1f}" font-size="11" text-anchor="end">{label}</text>'
            )
        parts.append(
            f'<text x="{(self.margin_l + self.width - self.margin_r) / 2}" '
            f'y="{self.height - 10}" font-size="13" text-anchor="middle">{_esc(xlabel)}</text>'
        )
        parts.append(
            f'<text x="16" y="{(self.margin_t + self.height - self.margin_b) / 2}" '
            'font-size="13" text-anchor="middle" '
            f'transform="rotate(-90 16 {(self.margin_t + self.height - self.margin_b) / 2})">'
            f"{_esc(ylabel)}</text>"
        )
        parts.append(
            f'<text x="{self.width / 2}" y="20" font-size="14" text-anchor="middle">'
            f"{_esc(title)}</text>"
        )
        return parts


def _document(frame: _Frame, body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{frame.width}" '
        f'height="{frame.height}" viewBox="0 0 {frame.width} {frame.height}">\n'
        '<rect width="100%" height="100%" fill="white"/>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def line_plot(
    x: Sequence[float],
    series: Sequence[tuple[str, Sequence[float]]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    ylog: bool = False,
) -> str:
    """Polyline plot of one or more named series over a common x grid."""
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(y, dtype=float) for _, y in series]
    stacked = np.concatenate([y[np.isfinite(y)] for y in ys]) if ys else np.array([])
    if stacked.size == 0:
        stacked = np.array([0.0, 1.0])
    if ylog:
        positive = stacked[stacked > 0]
        ylim = (
            (positive.min(), positive.max()) if positive.size else (1e-3, 1.0)
        )
    else:
        ylim = (min(stacked.min(), 0.0), stacked.max() * 1.05 if stacked.size else 1.0)
    frame = _Frame((x.min(), x.max()), ylim, ylog=ylog)
    body = frame.axes_svg(xlabel, ylabel, title)
    for i, (label, y) in enumerate(series):
        y = np.asarray(y, dtype=float)
        ok = np.isfinite(y) & ((y > 0) if ylog else True)
        pts = " ".join(
            f"{frame.px(a):.2f},{frame.py(b):.2f}" for a, b in zip(x[ok], y[ok])
        )
        color = _PALETTE[i % len(_PALETTE)]
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        body.append(
            f'<text x="{frame.width - frame.margin_r - 6}" y="{frame.margin_t + 16 + 15 * i}" '
            f'font-size="11" text-anchor="end" fill="{color}">{_esc(label)}</text>'
        )
    return _document(frame, body)


def heatmap(
    x: Sequence[float],
    y: Sequence[float],
    z: np.ndarray,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
) -> str:
    """Cell heatmap of ``z[i, j]`` over ``(y[i], x[j])`` with a colorbar."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if z.shape != (len(y), len(x)):
        raise ValueError(f"z has shape {z.shape}, expected ({len(y)}, {len(x)})")
    finite = z[np.isfinite(z)]
    zmin, zmax = (finite.min(), finite.max()) if finite.size else (0.0, 1.0)
    if zmax <= zmin:
        zmax = zmin + 1.0

    def edges(v):
        if len(v) == 1:
            return np.array([v[0] - 0.5, v[0] + 0.5])
        mid = (v[1:] + v[:-1]) / 2
        return np.concatenate([[2 * v[0] - mid[0]], mid, [2 * v[-1] - mid[-1]]])

    ex, ey = edges(x), edges(y)
    frame = _Frame((ex[0], ex[-1]), (ey[0], ey[-1]), width=700, margin_r=70)
    body = []
    for i in range(len(y)):
        for j in range(len(x)):
            v = z[i, j]
            if not np.isfinite(v):
                continue
            x0, x1 = frame.px(ex[j]), frame.px(ex[j + 1])
            y0, y1 = frame.py(ey[i + 1]), frame.py(ey[i])
            body.append(
                f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" '
                f'height="{y1 - y0:.2f}" fill="{_color((v - zmin) / (zmax - zmin))}"/>'
            )
    body.extend(frame.axes_svg(xlabel, ylabel, title))
    # colorbar
    bar_x, bar_w = frame.width - 46, 14
    bar_top, bar_bot = frame.margin_t, frame.height - frame.margin_b
    steps = 40
    for s in range(steps):
        f0 = s / steps
        yy0 = bar_bot + (bar_top - bar_bot) * (s + 1) / steps
        hh = (bar_bot - bar_top) / steps
        body.append(
            f'<rect x="{bar_x}" y="{yy0:.2f}" width="{bar_w}" height="{hh + 0.5:.2f}" '
            f'fill="{_color(f0 + 0.5 / steps)}"/>'
        )
    body.append(
        f'<text x="{bar_x + bar_w / 2}" y="{bar_bot + 14}" font-size="10" '
        f'text-anchor="middle">{_fmt(zmin)}</text>'
    )
    body.append(
        f'<text x="{bar_x + bar_w / 2}" y="{bar_top - 6}" font-size="10" '
        f'text-anchor="middle">{_fmt(zmax)}</text>'
    )
    return _document(frame, body)
