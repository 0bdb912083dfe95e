"""Self-contained SVG line charts (no plotting dependencies).

Just enough for the run outputs: several series over a shared x axis,
optional log-x, dashed styling for analytic reference curves, a small
legend.  Output is a single standalone .svg file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]

WIDTH, HEIGHT = 640, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 16, 40, 48


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    dashed: bool = False


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _fmt(value: float) -> str:
    return f"{value:g}"


def render_line_chart(
    path,
    series: list[Series],
    *,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    x_log: bool = False,
) -> Path:
    cleaned = []
    for s in series:
        x = np.asarray(s.x, dtype=float)
        y = np.asarray(s.y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        if x_log:
            keep &= x > 0
        if np.any(keep):
            cleaned.append((s, x[keep], y[keep]))
    if not cleaned:
        raise ValueError("nothing to plot")

    xs = np.concatenate([x for _, x, _ in cleaned])
    ys = np.concatenate([y for _, _, y in cleaned])
    if x_log:
        xs = np.log10(xs)
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>'
        )

    # axes box
    parts.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black"/>'
    )

    if x_log:
        lo_dec, hi_dec = math.floor(x_lo), math.ceil(x_hi)
        x_ticks = [d for d in range(lo_dec, hi_dec + 1) if x_lo - 1e-9 <= d <= x_hi + 1e-9]
        x_tick_labels = [f"1e{d}" for d in x_ticks]
        if not x_ticks:
            x_ticks, x_tick_labels = _nice_ticks(x_lo, x_hi), None
    else:
        x_ticks = _nice_ticks(x_lo, x_hi)
        x_tick_labels = None
    for i, t in enumerate(x_ticks):
        x = px(t)
        label = x_tick_labels[i] if x_tick_labels else _fmt(t)
        parts.append(
            f'<line x1="{x:.1f}" y1="{MARGIN_T + plot_h}" x2="{x:.1f}" '
            f'y2="{MARGIN_T + plot_h + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{MARGIN_T + plot_h + 18}" text-anchor="middle">'
            f"{escape(label)}</text>"
        )
    for t in _nice_ticks(y_lo, y_hi):
        y = py(t)
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{y:.1f}" x2="{MARGIN_L}" y2="{y:.1f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{y + 4:.1f}" text-anchor="end">{escape(_fmt(t))}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{MARGIN_L + plot_w / 2}" y="{HEIGHT - 10}" text-anchor="middle">'
            f"{escape(x_label)}</text>"
        )
    if y_label:
        y_mid = MARGIN_T + plot_h / 2
        parts.append(
            f'<text x="16" y="{y_mid}" text-anchor="middle" '
            f'transform="rotate(-90 16 {y_mid})">{escape(y_label)}</text>'
        )

    for i, (s, x, y) in enumerate(cleaned):
        color = PALETTE[i % len(PALETTE)]
        xv = np.log10(x) if x_log else x
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xv, y))
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>'
        )

    legend_y = MARGIN_T + 14
    for i, (s, _, _) in enumerate(cleaned):
        color = PALETTE[i % len(PALETTE)]
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        x0 = WIDTH - MARGIN_R - 150
        parts.append(
            f'<line x1="{x0}" y1="{legend_y}" x2="{x0 + 24}" y2="{legend_y}" '
            f'stroke="{color}" stroke-width="1.5"{dash}/>'
        )
        parts.append(f'<text x="{x0 + 30}" y="{legend_y + 4}">{escape(s.label)}</text>')
        legend_y += 16

    parts.append("</svg>")
    out = Path(path)
    out.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return out
