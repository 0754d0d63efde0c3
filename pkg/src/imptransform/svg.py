"""Minimal SVG line plots written as plain text."""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

COLORS = {"black": "#000000", "blue": "#1f5fbf", "red": "#c8322b",
          "green": "#2e8b3e", "orange": "#d98a1c", "gray": "#808080"}


def _nice_ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


class LinePlot:
    """Accumulates series and renders one SVG panel with axes and a legend."""

    def __init__(self, title="", xlabel="", ylabel="", width=640, height=400):
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.width, self.height = width, height
        self.series = []
        self.margin = (60, 20, 40, 50)  # left, right, top, bottom

    def line(self, x, y, label="", color="black", width=1.5, step=False):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if step and x.size:
            x = np.repeat(x, 2)[1:]
            y = np.repeat(y, 2)[:-1]
        self.series.append(("line", x, y, label, color, width))
        return self

    def stems(self, x, y, label="", color="black"):
        self.series.append(("stems", np.asarray(x, float), np.asarray(y, float),
                            label, color, 1.0))
        return self

    def _limits(self):
        xs = [s[1][np.isfinite(s[2])] for s in self.series if s[1].size]
        ys = [s[2][np.isfinite(s[2])] for s in self.series if s[2].size]
        xs = np.concatenate(xs) if xs else np.array([0.0, 1.0])
        ys = np.concatenate(ys) if ys else np.array([0.0, 1.0])
        if any(s[0] == "stems" for s in self.series):
            ys = np.append(ys, 0.0)
        if xs.size == 0:
            xs = np.array([0.0, 1.0])
        if ys.size == 0:
            ys = np.array([0.0, 1.0])
        x0, x1 = float(np.min(xs)), float(np.max(xs))
        y0, y1 = float(np.min(ys)), float(np.max(ys))
        if x1 == x0:
            x1 = x0 + 1.0
        pad = 0.05 * (y1 - y0) if y1 > y0 else 0.5 * max(abs(y0), 1.0)
        return x0, x1, y0 - pad, y1 + pad

    def render(self) -> str:
        left, right, top, bottom = self.margin
        pw = self.width - left - right
        ph = self.height - top - bottom
        x0, x1, y0, y1 = self._limits()

        def px(v):
            return left + (v - x0) / (x1 - x0) * pw

        def py(v):
            return top + (y1 - v) / (y1 - y0) * ph

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}" '
            f'font-family="sans-serif" font-size="11">',
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="white"/>',
            f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
        ]
        for t in _nice_ticks(x0, x1):
            X = px(t)
            out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 4}" stroke="#444"/>')
            out.append(f'<text x="{X:.2f}" y="{top + ph + 16}" text-anchor="middle">{t:g}</text>')
        for t in _nice_ticks(y0, y1):
            Y = py(t)
            out.append(f'<line x1="{left - 4}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="#444"/>')
            out.append(f'<text x="{left - 6}" y="{Y + 4:.2f}" text-anchor="end">{t:g}</text>')
        if self.title:
            out.append(f'<text x="{left + pw / 2:.1f}" y="{top - 12}" text-anchor="middle" '
                       f'font-size="13">{escape(self.title)}</text>')
        if self.xlabel:
            out.append(f'<text x="{left + pw / 2:.1f}" y="{self.height - 10}" '
                       f'text-anchor="middle">{escape(self.xlabel)}</text>')
        if self.ylabel:
            out.append(f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" '
                       f'transform="rotate(-90 14 {top + ph / 2:.1f})">{escape(self.ylabel)}</text>')

        for kind, x, y, label, color, width in self.series:
            c = COLORS.get(color, color)
            if kind == "stems":
                y_base = py(0.0)
                for xi, yi in zip(x, y):
                    out.append(f'<line x1="{px(xi):.2f}" y1="{y_base:.2f}" x2="{px(xi):.2f}" '
                               f'y2="{py(yi):.2f}" stroke="{c}" stroke-width="1"/>')
                continue
            ok = np.isfinite(y)
            # break the polyline at invalid samples
            runs = np.split(np.arange(x.size), np.nonzero(~ok)[0])
            for run in runs:
                run = run[ok[run]]
                if run.size < 2:
                    continue
                pts = " ".join(f"{px(x[i]):.2f},{py(y[i]):.2f}" for i in run)
                out.append(f'<polyline fill="none" stroke="{c}" stroke-width="{width}" points="{pts}"/>')

        labelled = [s for s in self.series if s[3]]
        for i, (_, _, _, label, color, _) in enumerate(labelled):
            y = top + 14 + 15 * i
            c = COLORS.get(color, color)
            out.append(f'<line x1="{left + pw - 130}" y1="{y - 4}" x2="{left + pw - 108}" '
                       f'y2="{y - 4}" stroke="{c}" stroke-width="2"/>')
            out.append(f'<text x="{left + pw - 102}" y="{y}">{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render())
        return path
