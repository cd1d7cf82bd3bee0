"""Minimal deterministic SVG line plots."""
from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import ConfigurationError

WIDTH, HEIGHT = 640, 420
MARGIN = {"left": 80, "right": 20, "top": 40, "bottom": 60}
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
DASHES = ("", "6,4", "2,3", "8,3,2,3")


@dataclass(frozen=True)
class PlotStyle:
    title: str = ""
    xlabel: str = "t"
    ylabel: str = "|Gamma|"
    pad: float = 0.05


def _range(v: np.ndarray, pad: float, what: str):
    lo, hi = float(v.min()), float(v.max())
    if hi > lo:
        d = pad * (hi - lo)
    else:
        d = pad * abs(lo) if lo != 0 else pad
    lo, hi = lo - d, hi + d
    if not hi > lo or not math.isfinite(hi - lo):
        raise ConfigurationError(f"degenerate {what} range")
    return lo, hi


def _ticks(lo: float, hi: float, n: int = 5):
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def _num(x: float) -> str:
    return f"{x:.3f}"


def _label(x: float) -> str:
    return f"{x:.3g}"


def emit_plot(series, style: PlotStyle = PlotStyle()) -> str:
    """Single-panel SVG 1.1 line plot.

    ``series`` is a list of ``(label, x, y)``.  All series need at least two
    finite points and the x data a non-zero span; a constant y range is
    padded by ``style.pad`` of its magnitude.  A legend is drawn when more
    than one series is given.
    """
    if not series:
        raise ConfigurationError("nothing to plot")
    data = []
    for label, x, y in series:
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if x.shape != y.shape or x.ndim != 1 or x.size < 2:
            raise ConfigurationError(f"series {label!r} needs at least two (x, y) points")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ConfigurationError(f"series {label!r} has non-finite values")
        data.append((str(label), x, y))
    allx = np.concatenate([d[1] for d in data])
    ally = np.concatenate([d[2] for d in data])
    if allx.max() == allx.min():
        raise ConfigurationError("degenerate x range")
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = _range(ally, style.pad, "y")

    L, R, T, B = MARGIN["left"], WIDTH - MARGIN["right"], MARGIN["top"], HEIGHT - MARGIN["bottom"]

    def sx(v):
        return L + (v - x0) / (x1 - x0) * (R - L)

    def sy(v):
        return B - (v - y0) / (y1 - y0) * (B - T)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{L}" y="{T}" width="{R - L}" height="{B - T}" fill="none" stroke="black"/>',
    ]
    for v in _ticks(x0, x1):
        X = _num(sx(v))
        out.append(f'<line x1="{X}" y1="{B}" x2="{X}" y2="{B + 5}" stroke="black"/>')
        out.append(f'<text x="{X}" y="{B + 20}" font-size="12" text-anchor="middle">{_label(v)}</text>')
    for v in _ticks(y0, y1):
        Y = _num(sy(v))
        out.append(f'<line x1="{L - 5}" y1="{Y}" x2="{L}" y2="{Y}" stroke="black"/>')
        out.append(f'<text x="{L - 8}" y="{Y}" font-size="12" text-anchor="end" '
                   f'dominant-baseline="middle">{_label(v)}</text>')
    out.append(f'<text x="{(L + R) / 2:.1f}" y="{HEIGHT - 15}" font-size="14" text-anchor="middle">'
               f'{escape(style.xlabel)}</text>')
    out.append(f'<text x="20" y="{(T + B) / 2:.1f}" font-size="14" text-anchor="middle" '
               f'transform="rotate(-90 20 {(T + B) / 2:.1f})">{escape(style.ylabel)}</text>')
    if style.title:
        out.append(f'<text x="{(L + R) / 2:.1f}" y="25" font-size="15" text-anchor="middle">'
                   f'{escape(style.title)}</text>')
    for k, (label, x, y) in enumerate(data):
        pts = " ".join(f"{_num(sx(a))},{_num(sy(b))}" for a, b in zip(x, y))
        dash = DASHES[k % len(DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline data-series="{escape(label)}" points="{pts}" fill="none" '
                   f'stroke="{COLORS[k % len(COLORS)]}" stroke-width="1.5"{dash_attr}/>')
    if len(data) > 1:
        for k, (label, _, _) in enumerate(data):
            y = T + 18 + 18 * k
            dash = DASHES[k % len(DASHES)]
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            out.append(f'<line x1="{R - 150}" y1="{y}" x2="{R - 120}" y2="{y}" '
                       f'stroke="{COLORS[k % len(COLORS)]}" stroke-width="1.5"{dash_attr}/>')
            out.append(f'<text x="{R - 112}" y="{y + 4}" font-size="12">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
