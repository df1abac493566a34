"""Deterministic vector-graphics outputs for weight maps and predictions.

SVG text is assembled directly with fixed-precision coordinates, so the same
input always produces byte-identical files that can be diffed in tests.
Light cells denote positive values and dark cells negative ones.
"""

from __future__ import annotations

import math

import numpy as np

from .relevance import significance_stars

CELL_PX = 34
MARGIN_LEFT = 64
MARGIN_TOP = 46
MARGIN_RIGHT = 20
MARGIN_BOTTOM = 56

_DARK = (26, 44, 92)       # most negative
_MID = (128, 128, 128)     # zero
_LIGHT = (255, 250, 205)   # most positive


def _lerp(a: tuple[int, int, int], b: tuple[int, int, int], t: float) -> str:
    rgb = tuple(round(a[i] + (b[i] - a[i]) * t) for i in range(3))
    return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"


def diverging_color(value: float, max_abs: float) -> str:
    """Two-sided palette centered at zero; mid gray when the range is flat."""
    if max_abs == 0.0:
        return _lerp(_MID, _MID, 0.0)
    t = max(-1.0, min(1.0, value / max_abs))
    if t < 0:
        return _lerp(_MID, _DARK, -t)
    return _lerp(_MID, _LIGHT, t)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))


def _svg_document(width: float, height: float, body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
            f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">')
    style = ('<style>text{font-family:Helvetica,Arial,sans-serif;font-size:11px;'
             'fill:#222}.title{font-size:13px;font-weight:bold}</style>')
    return "\n".join([head, style, *body, "</svg>"]) + "\n"


def render_heatmap(matrix: np.ndarray, row_labels: list[str],
                   col_labels: list[str], title: str = "") -> str:
    """Grid of colored cells with row/column labels and a zero-centered palette."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise ValueError("matrix must be 2-D")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("matrix contains non-finite entries")
    n_rows, n_cols = matrix.shape
    if len(row_labels) != n_rows or len(col_labels) != n_cols:
        raise ValueError("label counts must match the matrix shape")
    max_abs = float(np.max(np.abs(matrix)))
    width = MARGIN_LEFT + n_cols * CELL_PX + MARGIN_RIGHT
    height = MARGIN_TOP + n_rows * CELL_PX + MARGIN_BOTTOM
    body: list[str] = []
    if title:
        body.append(f'<text class="title" x="{_fmt(MARGIN_LEFT)}" y="20">'
                    f'{_esc(title)}</text>')
    for i in range(n_rows):
        y = MARGIN_TOP + i * CELL_PX
        body.append(f'<text x="{_fmt(MARGIN_LEFT - 6)}" '
                    f'y="{_fmt(y + CELL_PX / 2 + 4)}" text-anchor="end">'
                    f'{_esc(row_labels[i])}</text>')
        for j in range(n_cols):
            x = MARGIN_LEFT + j * CELL_PX
            color = diverging_color(float(matrix[i, j]), max_abs)
            body.append(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{CELL_PX}" '
                        f'height="{CELL_PX}" fill="{color}" stroke="#ffffff" '
                        f'stroke-width="1"/>')
    label_y = MARGIN_TOP + n_rows * CELL_PX + 14
    for j in range(n_cols):
        x = MARGIN_LEFT + j * CELL_PX + CELL_PX / 2
        body.append(f'<text x="{_fmt(x)}" y="{_fmt(label_y)}" text-anchor="middle" '
                    f'transform="rotate(45 {_fmt(x)} {_fmt(label_y)})">'
                    f'{_esc(col_labels[j])}</text>')
    return _svg_document(width, height, body)


def render_scatter(true_values: np.ndarray, predicted: np.ndarray,
                   pearson_r: float, p_value: float, title: str = "",
                   size_px: float = 320.0) -> str:
    """True-versus-predicted scatter with an identity line and r annotation."""
    true_values = np.asarray(true_values, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if true_values.shape != predicted.shape or true_values.ndim != 1:
        raise ValueError("true and predicted must be equal-length vectors")
    if true_values.size < 2:
        raise ValueError("need at least 2 points")
    if not (np.all(np.isfinite(true_values)) and np.all(np.isfinite(predicted))):
        raise ValueError("inputs contain non-finite values")
    lo = float(min(true_values.min(), predicted.min()))
    hi = float(max(true_values.max(), predicted.max()))
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.06 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    margin = 48.0
    width = height = size_px + 2 * margin

    def sx(v: float) -> float:
        return margin + (v - lo) / (hi - lo) * size_px

    def sy(v: float) -> float:
        return margin + size_px - (v - lo) / (hi - lo) * size_px

    body = [
        f'<rect x="{_fmt(margin)}" y="{_fmt(margin)}" width="{_fmt(size_px)}" '
        f'height="{_fmt(size_px)}" fill="none" stroke="#444" stroke-width="1"/>',
        f'<line x1="{_fmt(sx(lo))}" y1="{_fmt(sy(lo))}" x2="{_fmt(sx(hi))}" '
        f'y2="{_fmt(sy(hi))}" stroke="#999" stroke-dasharray="4 3"/>',
    ]
    if title:
        body.insert(0, f'<text class="title" x="{_fmt(margin)}" y="24">'
                       f'{_esc(title)}</text>')
    for tv, pv in zip(true_values, predicted):
        body.append(f'<circle cx="{_fmt(sx(tv))}" cy="{_fmt(sy(pv))}" r="4" '
                    f'fill="#2a6fb0" fill-opacity="0.85"/>')
    stars = significance_stars(p_value)
    label = f"r = {pearson_r:.3f}{stars}" if math.isfinite(pearson_r) else "r undefined"
    body.append(f'<text x="{_fmt(margin + 8)}" y="{_fmt(margin + 16)}">'
                f'{_esc(label)}</text>')
    body.append(f'<text x="{_fmt(margin + size_px / 2)}" '
                f'y="{_fmt(height - 12)}" text-anchor="middle">true</text>')
    body.append(f'<text x="14" y="{_fmt(margin + size_px / 2)}" text-anchor="middle" '
                f'transform="rotate(-90 14 {_fmt(margin + size_px / 2)})">'
                f'predicted</text>')
    return _svg_document(width, height, body)


def save_svg(text: str, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
