"""Tiny deterministic SVG 1.1 emitter for scatter + band plots and coverage curves."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=64, right=16, top=28, bottom=44)
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    span = hi - lo
    if span <= 0:
        return np.array([lo])
    step = 10 ** np.floor(np.log10(span / n))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= n:
            step *= mult
            break
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + step * 1e-9, step)


class Canvas:
    def __init__(self, xlim, ylim, title="", xlabel="x", ylabel="y", width=WIDTH, height=HEIGHT):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.w, self.h = width, height
        self.parts: list[str] = []
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self._legend: list[tuple[str, str]] = []

    def px(self, x):
        m = MARGIN
        return m["left"] + (np.asarray(x) - self.x0) / (self.x1 - self.x0) * (self.w - m["left"] - m["right"])

    def py(self, y):
        m = MARGIN
        return self.h - m["bottom"] - (np.asarray(y) - self.y0) / (self.y1 - self.y0) * (
            self.h - m["top"] - m["bottom"]
        )

    def _points(self, x, y) -> str:
        return " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(self.px(x), self.py(y)))

    def polygon(self, x, lower, upper, fill="#999999", opacity=0.45):
        xs = np.concatenate([x, x[::-1]])
        ys = np.concatenate([lower, upper[::-1]])
        self.parts.append(
            f'<polygon points="{self._points(xs, ys)}" fill="{fill}" fill-opacity="{opacity}" stroke="none"/>'
        )

    def polyline(self, x, y, color="#000000", width=1.5, dash=None, label=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<polyline points="{self._points(x, y)}" fill="none" stroke="{color}" stroke-width="{width}"{d}/>'
        )
        if label:
            self._legend.append((label, color))

    def scatter(self, x, y, r=1.8, color="#333333"):
        for a, b in zip(self.px(x), self.py(y)):
            self.parts.append(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="{r}" fill="{color}"/>')

    def hline(self, y, color="#777777", dash="4,3"):
        self.polyline([self.x0, self.x1], [y, y], color, 1.0, dash)

    def _axes(self) -> list[str]:
        m = MARGIN
        out = [
            f'<rect x="{m["left"]}" y="{m["top"]}" width="{self.w - m["left"] - m["right"]}" '
            f'height="{self.h - m["top"] - m["bottom"]}" fill="none" stroke="#000000" stroke-width="1"/>'
        ]
        ybase = self.h - m["bottom"]
        for t in _nice_ticks(self.x0, self.x1):
            X = _fmt(float(self.px(t)))
            out.append(f'<line x1="{X}" y1="{ybase}" x2="{X}" y2="{ybase + 4}" stroke="#000000"/>')
            out.append(f'<text x="{X}" y="{ybase + 16}" font-size="11" text-anchor="middle">{t:g}</text>')
        for t in _nice_ticks(self.y0, self.y1):
            Y = _fmt(float(self.py(t)))
            out.append(f'<line x1="{m["left"] - 4}" y1="{Y}" x2="{m["left"]}" y2="{Y}" stroke="#000000"/>')
            out.append(
                f'<text x="{m["left"] - 6}" y="{Y}" font-size="11" text-anchor="end" '
                f'dominant-baseline="middle">{t:.6g}</text>'
            )
        out.append(
            f'<text x="{self.w / 2:.1f}" y="{self.h - 8}" font-size="12" text-anchor="middle">{escape(self.xlabel)}</text>'
        )
        out.append(
            f'<text x="14" y="{self.h / 2:.1f}" font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 14 {self.h / 2:.1f})">{escape(self.ylabel)}</text>'
        )
        if self.title:
            out.append(f'<text x="{self.w / 2:.1f}" y="18" font-size="13" text-anchor="middle">{escape(self.title)}</text>')
        for i, (label, color) in enumerate(self._legend):
            y = m["top"] + 14 + 14 * i
            x = self.w - m["right"] - 150
            out.append(f'<line x1="{x}" y1="{y}" x2="{x + 18}" y2="{y}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{x + 24}" y="{y + 4}" font-size="11">{escape(label)}</text>')
        return out

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.w}" height="{self.h}" '
            f'viewBox="0 0 {self.w} {self.h}">\n'
            f'<rect width="{self.w}" height="{self.h}" fill="#ffffff"/>\n'
        )
        return head + "\n".join(self.parts + self._axes()) + "\n</svg>\n"


def _limits(*arrays, pad=0.05):
    lo = min(float(np.min(a)) for a in arrays)
    hi = max(float(np.max(a)) for a in arrays)
    if hi == lo:
        hi, lo = hi + 1.0, lo - 1.0
    d = (hi - lo) * pad
    return lo - d, hi + d


def band_svg(xs, ys, band, title="", overlay=None, xlabel="x", ylabel="y") -> str:
    """Scatter of the data, shaded band, centre curve; ``overlay`` bands drawn as dashed bounds."""
    overlay = overlay or []
    ylim = _limits(ys, band.lower, band.upper, *[b.lower for b in overlay], *[b.upper for b in overlay])
    c = Canvas(_limits(xs, band.grid, pad=0.02), ylim, title or band.method.label, xlabel, ylabel)
    c.polygon(band.grid, band.lower, band.upper)
    c.scatter(xs, ys)
    c.polyline(band.grid, band.estimate, "#000000", 1.5, label=band.method.label)
    for i, b in enumerate(overlay):
        col = PALETTE[(i + 1) % len(PALETTE)]
        c.polyline(b.grid, b.lower, col, 1.2, "5,3", label=b.method.label)
        c.polyline(b.grid, b.upper, col, 1.2, "5,3")
    return c.render()


def coverage_svg(report, level=None, title="Empirical coverage") -> str:
    """Coverage curves with +/-1.96 MC SE bands, one colour per method."""
    level = report.level if level is None else level
    lows = [report.coverage(m) - 1.96 * report.mc_se(m) for m in report.methods]
    c = Canvas(_limits(report.grid, pad=0.02), (min(0.5, *(float(l.min()) for l in lows)), 1.0), title, "x", "coverage")
    for i, m in enumerate(report.methods):
        col = PALETTE[i % len(PALETTE)]
        cov, se = report.coverage(m), report.mc_se(m)
        c.polygon(report.grid, cov - 1.96 * se, cov + 1.96 * se, col, 0.15)
        c.polyline(report.grid, cov, col, 1.5, label=m)
    c.hline(level)
    return c.render()
