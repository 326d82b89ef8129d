"""Minimal deterministic SVG line plots with shaded error bands.

Kept dependency-free on purpose: the harness promises byte-identical output
files for identical inputs, which is easier to guarantee with a fixed-format
text writer than with a plotting library.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)

_WIDTH, _HEIGHT = 820.0, 520.0
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70.0, 20.0, 40.0, 50.0


@dataclass
class Curve:
    label: str
    x: np.ndarray
    y: np.ndarray
    band: np.ndarray | None = None  # half-width around y


@dataclass
class LinePlot:
    title: str
    x_label: str
    y_label: str
    curves: list[Curve] = field(default_factory=list)

    def add(self, label: str, x, y, band=None) -> None:
        self.curves.append(
            Curve(
                label=label,
                x=np.asarray(x, dtype=float),
                y=np.asarray(y, dtype=float),
                band=None if band is None else np.asarray(band, dtype=float),
            )
        )

    def render(self) -> str:
        return _render(self)


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, n)
    return [float(v) for v in raw]


def _render(plot: LinePlot) -> str:
    xs = [c.x for c in plot.curves if c.x.size]
    ys = []
    for c in plot.curves:
        if not c.y.size:
            continue
        ys.append(c.y if c.band is None else c.y + c.band)
        ys.append(c.y if c.band is None else c.y - c.band)
    x_lo = min((float(np.min(v)) for v in xs), default=0.0)
    x_hi = max((float(np.max(v)) for v in xs), default=1.0)
    y_lo = min((float(np.min(v)) for v in ys), default=0.0)
    y_hi = max((float(np.max(v)) for v in ys), default=1.0)
    y_lo = min(y_lo, 0.0)
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0

    span_x = _WIDTH - _MARGIN_L - _MARGIN_R
    span_y = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(v: float) -> float:
        return _MARGIN_L + (v - x_lo) / (x_hi - x_lo) * span_x

    def py(v: float) -> float:
        return _HEIGHT - _MARGIN_B - (v - y_lo) / (y_hi - y_lo) * span_y

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:.0f}" '
        f'height="{_HEIGHT:.0f}" viewBox="0 0 {_WIDTH:.0f} {_HEIGHT:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{plot.title}</text>',
    ]

    # axes
    out.append(
        f'<line x1="{_MARGIN_L:.1f}" y1="{py(y_lo):.1f}" x2="{_WIDTH - _MARGIN_R:.1f}" '
        f'y2="{py(y_lo):.1f}" stroke="black" stroke-width="1"/>'
    )
    out.append(
        f'<line x1="{_MARGIN_L:.1f}" y1="{py(y_lo):.1f}" x2="{_MARGIN_L:.1f}" '
        f'y2="{_MARGIN_T:.1f}" stroke="black" stroke-width="1"/>'
    )
    for tx in _ticks(x_lo, x_hi):
        out.append(
            f'<text x="{px(tx):.1f}" y="{py(y_lo) + 18:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(tx)}</text>'
        )
    for ty in _ticks(y_lo, y_hi):
        out.append(
            f'<text x="{_MARGIN_L - 6:.1f}" y="{py(ty) + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(ty)}</text>'
        )
    out.append(
        f'<text x="{_WIDTH / 2:.1f}" y="{_HEIGHT - 12:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{plot.x_label}</text>'
    )
    out.append(
        f'<text x="18" y="{_HEIGHT / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {_HEIGHT / 2:.1f})">{plot.y_label}</text>'
    )

    for i, curve in enumerate(plot.curves):
        color = _PALETTE[i % len(_PALETTE)]
        if curve.x.size == 0:
            continue
        if curve.band is not None and curve.band.size:
            upper = [(px(x), py(y + b)) for x, y, b in zip(curve.x, curve.y, curve.band)]
            lower = [(px(x), py(y - b)) for x, y, b in zip(curve.x, curve.y, curve.band)]
            pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in upper + lower[::-1])
            out.append(f'<polygon points="{pts}" fill="{color}" fill-opacity="0.15"/>')
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(curve.x, curve.y))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"/>'
        )
        ly = _MARGIN_T + 14 + 16 * i
        out.append(
            f'<line x1="{_WIDTH - 190:.1f}" y1="{ly:.1f}" x2="{_WIDTH - 168:.1f}" '
            f'y2="{ly:.1f}" stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{_WIDTH - 162:.1f}" y="{ly + 4:.1f}" font-family="sans-serif" '
            f'font-size="12">{curve.label}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
