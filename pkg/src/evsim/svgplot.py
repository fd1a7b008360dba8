"""Static SVG charts emitted by direct geometry, no plotting stack."""

from __future__ import annotations

import numpy as np

_W, _H = 960, 360
_MARGIN = 55


def _scale(values: np.ndarray, lo: float, hi: float, out_lo: float,
           out_hi: float) -> np.ndarray:
    if hi == lo:
        hi = lo + 1.0
    return out_lo + (np.asarray(values, float) - lo) / (hi - lo) * (out_hi - out_lo)


def _polyline(xs, ys, color: str, width: float = 1.0) -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    return (f'<polyline fill="none" stroke="{color}" stroke-width="{width}" '
            f'points="{pts}"/>')


def _frame(title: str, parts: list[str], width: int = _W, height: int = _H) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">'
            f'<rect width="{width}" height="{height}" fill="white"/>'
            f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>')
    return head + "".join(parts) + "</svg>"


def _axis_labels(y_lo: float, y_hi: float, top: float, bottom: float) -> list[str]:
    out = []
    for frac in (0.0, 0.5, 1.0):
        val = y_lo + frac * (y_hi - y_lo)
        y = bottom - frac * (bottom - top)
        out.append(f'<text x="{_MARGIN - 6}" y="{y + 4:.1f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{val:.0f}</text>')
        out.append(f'<line x1="{_MARGIN}" y1="{y:.1f}" x2="{_W - 20}" y2="{y:.1f}" '
                   f'stroke="#ddd" stroke-width="0.5"/>')
    return out


def load_profile_svg(values: np.ndarray, capacity_kw: float, title: str) -> str:
    """Single-panel load series with the transformer capacity line."""
    values = np.asarray(values, float)
    top, bottom = 35.0, _H - 30.0
    y_hi = max(float(values.max(initial=0.0)), capacity_kw) * 1.05
    parts = _axis_labels(0.0, y_hi, top, bottom)
    xs = _scale(np.arange(len(values)), 0, max(1, len(values) - 1), _MARGIN, _W - 20)
    ys = _scale(values, 0.0, y_hi, bottom, top)
    parts.append(_polyline(xs, ys, "#1f6fb2"))
    cap_y = float(_scale(np.array([capacity_kw]), 0.0, y_hi, bottom, top)[0])
    parts.append(f'<line x1="{_MARGIN}" y1="{cap_y:.1f}" x2="{_W - 20}" '
                 f'y2="{cap_y:.1f}" stroke="#c0392b" stroke-width="1.5" '
                 f'stroke-dasharray="6,4"/>')
    parts.append(f'<text x="{_W - 22}" y="{cap_y - 5:.1f}" text-anchor="end" '
                 f'font-family="sans-serif" font-size="11" fill="#c0392b">'
                 f'capacity {capacity_kw:g} kW</text>')
    return _frame(title, parts)


def day_zoom_svg(top_values: np.ndarray, bottom_values: np.ndarray,
                 capacity_kw: float, top_label: str, bottom_label: str,
                 title: str) -> str:
    """Two stacked panels with shared axes for a day-level comparison."""
    height = 2 * _H
    y_hi = max(float(np.max(top_values, initial=0.0)),
               float(np.max(bottom_values, initial=0.0)), capacity_kw) * 1.05
    parts: list[str] = []
    for panel, (vals, label) in enumerate([(top_values, top_label),
                                           (bottom_values, bottom_label)]):
        off = panel * _H
        top, bottom = off + 35.0, off + _H - 30.0
        for frac in (0.0, 0.5, 1.0):
            val = frac * y_hi
            y = bottom - frac * (bottom - top)
            parts.append(f'<text x="{_MARGIN - 6}" y="{y + 4:.1f}" text-anchor="end" '
                         f'font-family="sans-serif" font-size="11">{val:.0f}</text>')
        xs = _scale(np.arange(len(vals)), 0, max(1, len(vals) - 1), _MARGIN, _W - 20)
        ys = _scale(np.asarray(vals, float), 0.0, y_hi, bottom, top)
        parts.append(_polyline(xs, ys, "#1f6fb2"))
        cap_y = bottom - capacity_kw / y_hi * (bottom - top)
        parts.append(f'<line x1="{_MARGIN}" y1="{cap_y:.1f}" x2="{_W - 20}" '
                     f'y2="{cap_y:.1f}" stroke="#c0392b" stroke-width="1.5" '
                     f'stroke-dasharray="6,4"/>')
        parts.append(f'<text x="{_MARGIN + 5}" y="{top + 2:.1f}" '
                     f'font-family="sans-serif" font-size="12">{label}</text>')
    return _frame(title, parts, height=height)


def bar_chart_svg(labels: list[str], counts: list[int], title: str,
                  y_label: str = "count") -> str:
    """Per-user bar chart (e.g. dissatisfaction events by anonymized user)."""
    n = len(labels)
    top, bottom = 35.0, _H - 45.0
    parts: list[str] = []
    if n == 0:
        parts.append(f'<text x="{_W / 2:.0f}" y="{_H / 2:.0f}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12">no events</text>')
        return _frame(title, parts)
    y_hi = max(max(counts), 1) * 1.1
    slot = (_W - 20 - _MARGIN) / n
    bar_w = max(1.0, slot * 0.7)
    for i, (lab, c) in enumerate(zip(labels, counts)):
        x = _MARGIN + i * slot + (slot - bar_w) / 2
        h = c / y_hi * (bottom - top)
        parts.append(f'<rect x="{x:.1f}" y="{bottom - h:.1f}" width="{bar_w:.1f}" '
                     f'height="{h:.1f}" fill="#2e8b57"/>')
        if n <= 40:
            parts.append(f'<text x="{x + bar_w / 2:.1f}" y="{bottom + 14:.1f}" '
                         f'text-anchor="middle" font-family="sans-serif" '
                         f'font-size="9">{lab}</text>')
    parts.append(f'<text x="16" y="{(top + bottom) / 2:.0f}" font-family="sans-serif" '
                 f'font-size="11" transform="rotate(-90 16 {(top + bottom) / 2:.0f})" '
                 f'text-anchor="middle">{y_label}</text>')
    return _frame(title, parts)
