"""A small SVG writer: axes, polylines and heatmaps, nothing else.

Output depends only on the inputs (fixed number formatting, no timestamps),
so plots can be compared byte for byte against golden files.
"""
from __future__ import annotations

import math
from html import escape
from typing import Sequence

import numpy as np

W, H = 640, 420
L, R, T, B = 70, 20, 40, 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
# five-stop ramp from dark blue to yellow, interpolated linearly
RAMP = ((0.0, (68, 1, 84)), (0.25, (59, 82, 139)), (0.5, (33, 145, 140)),
        (0.75, (94, 201, 98)), (1.0, (253, 231, 37)))


def _n(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".") if math.isfinite(v) else "0"


def _ticks(lo: float, hi: float, k: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / k))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (m * step) <= k:
            step *= m
            break
    first = math.ceil(lo / step) * step
    return [first + i * step for i in range(int((hi - first) / step + 1e-9) + 1)]


def _label(v: float) -> str:
    return f"{v:.3g}"


def _frame(title: str, xlabel: str, ylabel: str, xr, yr) -> list[str]:
    pw, ph = W - L - R, H - T - B
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
           f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W // 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
           f'<rect x="{L}" y="{T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for v in _ticks(*xr):
        px = L + (v - xr[0]) / (xr[1] - xr[0]) * pw
        out.append(f'<line x1="{_n(px)}" y1="{T + ph}" x2="{_n(px)}" y2="{T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_n(px)}" y="{T + ph + 18}" text-anchor="middle" font-size="11">{_label(v)}</text>')
    for v in _ticks(*yr):
        py = T + ph - (v - yr[0]) / (yr[1] - yr[0]) * ph
        out.append(f'<line x1="{L - 5}" y1="{_n(py)}" x2="{L}" y2="{_n(py)}" stroke="black"/>')
        out.append(f'<text x="{L - 8}" y="{_n(py + 4)}" text-anchor="end" font-size="11">{_label(v)}</text>')
    out.append(f'<text x="{L + pw // 2}" y="{H - 10}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{T + ph // 2}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 16 {T + ph // 2})">{escape(ylabel)}</text>')
    return out


def _range(vals) -> tuple[float, float]:
    v = np.asarray(vals, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return (0.0, 1.0)
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def line_plot(series: Sequence[tuple[str, Sequence[float], Sequence[float]]], title: str = "",
              xlabel: str = "x", ylabel: str = "y") -> str:
    """One polyline per (label, xs, ys); non-finite points break the line."""
    xr = _range(np.concatenate([np.asarray(s[1], float) for s in series]))
    yr = _range(np.concatenate([np.asarray(s[2], float) for s in series]))
    pw, ph = W - L - R, H - T - B
    out = _frame(title, xlabel, ylabel, xr, yr)
    for k, (label, xs, ys) in enumerate(series):
        col = PALETTE[k % len(PALETTE)]
        seg: list[str] = []
        segs = [seg]
        for x, y in zip(xs, ys):
            if not (math.isfinite(x) and math.isfinite(y)):
                seg = []
                segs.append(seg)
                continue
            px = L + (x - xr[0]) / (xr[1] - xr[0]) * pw
            py = T + ph - (y - yr[0]) / (yr[1] - yr[0]) * ph
            seg.append(f"{_n(px)},{_n(py)}")
        for sg in segs:
            if len(sg) > 1:
                out.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" points="{" ".join(sg)}"/>')
        ly = T + 14 + 16 * k
        out.append(f'<line x1="{W - R - 120}" y1="{ly}" x2="{W - R - 100}" y2="{ly}" stroke="{col}" stroke-width="2"/>')
        out.append(f'<text x="{W - R - 95}" y="{ly + 4}" font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    for (a, ca), (b, cb) in zip(RAMP, RAMP[1:]):
        if t <= b:
            s = (t - a) / (b - a)
            r, g, bl = (round(ca[i] + s * (cb[i] - ca[i])) for i in range(3))
            return f"#{r:02x}{g:02x}{bl:02x}"
    return "#fde725"


def heatmap(values: np.ndarray, x_range: tuple[float, float], y_range: tuple[float, float],
            title: str = "", xlabel: str = "x", ylabel: str = "y", max_cells: int = 120) -> str:
    """values[j, i] at row j (y increasing) and column i (x increasing); block-averaged to max_cells."""
    v = np.asarray(values, dtype=float)
    sj = max(1, math.ceil(v.shape[0] / max_cells))
    si = max(1, math.ceil(v.shape[1] / max_cells))
    nj, ni = v.shape[0] // sj, v.shape[1] // si
    v = v[: nj * sj, : ni * si].reshape(nj, sj, ni, si).mean(axis=(1, 3))
    lo, hi = _range(v)
    pw, ph = W - L - R, H - T - B
    out = _frame(title, xlabel, ylabel, x_range, y_range)
    cw, chh = pw / ni, ph / nj
    for j in range(nj):
        for i in range(ni):
            col = _color((v[j, i] - lo) / (hi - lo))
            out.append(f'<rect x="{_n(L + i * cw)}" y="{_n(T + ph - (j + 1) * chh)}" width="{_n(cw + 0.3)}" '
                       f'height="{_n(chh + 0.3)}" fill="{col}"/>')
    out.append(f'<rect x="{L}" y="{T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
