"""Minimal self-contained SVG line charts (no rendering dependencies).

One polyline per series on a log10 y-axis; intended for the distance
measures, which live across hundreds of orders of magnitude.
"""
from __future__ import annotations

import numpy as np

_WIDTH, _HEIGHT = 860, 520
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 160, 40, 50
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def write_line_chart(
    path: str,
    series: dict[str, tuple[np.ndarray, np.ndarray]],
    title: str = "",
    x_label: str = "round",
    y_label: str = "log10 value",
) -> None:
    """Write a log10-y line chart of the given (x, y) series to ``path``."""
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B
    cleaned = {}
    for name, (xs, ys) in series.items():
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        keep = np.isfinite(xs) & np.isfinite(ys) & (ys > 0)
        if keep.any():
            cleaned[name] = (xs[keep], np.log10(ys[keep]))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH / 2}" y="24" text-anchor="middle" font-size="15">'
            f"{title}</text>"
        )
    if not cleaned:
        parts.append(
            f'<text x="{_WIDTH / 2}" y="{_HEIGHT / 2}" text-anchor="middle">'
            "no positive finite data</text></svg>"
        )
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(parts))
        return

    x_min = min(v[0].min() for v in cleaned.values())
    x_max = max(v[0].max() for v in cleaned.values())
    y_min = min(v[1].min() for v in cleaned.values())
    y_max = max(v[1].max() for v in cleaned.values())
    if x_max <= x_min:
        x_max = x_min + 1.0
    if y_max <= y_min:
        y_max, y_min = y_min + 0.5, y_min - 0.5

    def sx(v):
        return _MARGIN_L + (v - x_min) / (x_max - x_min) * plot_w

    def sy(v):
        return _MARGIN_T + (y_max - v) / (y_max - y_min) * plot_h

    # frame and ticks
    parts.append(
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#444"/>'
    )
    for i in range(5):
        xv = x_min + i * (x_max - x_min) / 4
        px = sx(xv)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_MARGIN_T + plot_h}" x2="{_fmt(px)}" '
            f'y2="{_MARGIN_T + plot_h + 5}" stroke="#444"/>'
            f'<text x="{_fmt(px)}" y="{_MARGIN_T + plot_h + 20}" text-anchor="middle">'
            f"{xv:.0f}</text>"
        )
        yv = y_min + i * (y_max - y_min) / 4
        py = sy(yv)
        parts.append(
            f'<line x1="{_MARGIN_L - 5}" y1="{_fmt(py)}" x2="{_MARGIN_L}" '
            f'y2="{_fmt(py)}" stroke="#444"/>'
            f'<text x="{_MARGIN_L - 8}" y="{_fmt(py + 4)}" text-anchor="end">'
            f"1e{yv:.0f}</text>"
        )
    parts.append(
        f'<text x="{_MARGIN_L + plot_w / 2}" y="{_HEIGHT - 10}" text-anchor="middle">'
        f"{x_label}</text>"
        f'<text x="18" y="{_MARGIN_T + plot_h / 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_MARGIN_T + plot_h / 2})">{y_label}</text>'
    )
    # series polylines, decimated to at most ~2000 points each
    for idx, (name, (xs, ys)) in enumerate(cleaned.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        step = max(1, len(xs) // 2000)
        pts = " ".join(
            f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(xs[::step], ys[::step])
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.4"/>'
        )
        ly = _MARGIN_T + 16 + 18 * idx
        lx = _MARGIN_L + plot_w + 12
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
            f'<text x="{lx + 28}" y="{ly}">{name}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))

