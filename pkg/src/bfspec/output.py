"""Deterministic CSV / JSON / SVG emitters.

Floats are always written with 17 significant digits so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from html import escape

import numpy as np


def fmt(x) -> str:
    return format(float(x) + 0.0, ".17g")  # + 0.0 folds -0.0 into 0.0


def _json_value(v, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    if isinstance(v, complex):
        return _json_value([v.real, v.imag], indent, level)
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{_json_value(str(k), indent, level + 1)}: {_json_value(x, indent, level + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        seq = list(v)
        if not seq:
            return "[]"
        if all(isinstance(x, (int, float, np.number)) and not isinstance(x, bool) for x in seq):
            return "[" + ", ".join(_json_value(x, indent, level + 1) for x in seq) + "]"
        return "[\n" + ",\n".join(pad + _json_value(x, indent, level + 1) for x in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dump_json(obj, indent: int = 2) -> str:
    return _json_value(obj, indent, 0) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


# --------------------------------------------------------------------------
# SVG

_W, _H, _M = 520, 520, 60


def _scale(lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return lambda v: a + (v - lo) / span * (b - a)


def svg_curve(points, title="", xlabel="Re λ", ylabel="Im λ") -> str:
    """Closed polyline with axes through the origin and labelled frame."""
    pts = np.asarray(points, dtype=float)
    xmax = float(np.abs(pts[:, 0]).max()) or 1.0
    ymax = float(np.abs(pts[:, 1]).max()) or 1.0
    sx = _scale(-1.1 * xmax, 1.1 * xmax, _M, _W - _M)
    sy = _scale(-1.1 * ymax, 1.1 * ymax, _H - _M, _M)
    path = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in pts)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="{_M}" y="{_M}" width="{_W - 2 * _M}" height="{_H - 2 * _M}" fill="none" stroke="#888"/>',
        f'<line x1="{_M}" y1="{sy(0):.3f}" x2="{_W - _M}" y2="{sy(0):.3f}" stroke="#bbb"/>',
        f'<line x1="{sx(0):.3f}" y1="{_M}" x2="{sx(0):.3f}" y2="{_H - _M}" stroke="#bbb"/>',
        f'<polygon points="{path}" fill="none" stroke="#b22" stroke-width="1.5"/>',
        f'<text x="{_W / 2}" y="{_H - 15}" text-anchor="middle" font-size="14">{escape(xlabel)}</text>',
        f'<text x="18" y="{_H / 2}" text-anchor="middle" font-size="14" transform="rotate(-90 18 {_H / 2})">{escape(ylabel)}</text>',
        f'<text x="{_M}" y="{_M - 20}" font-size="11">Re: ±{fmt(1.1 * xmax)}  Im: ±{fmt(1.1 * ymax)}</text>',
    ]
    if title:
        out.append(f'<text x="{_W / 2}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


_COLORS = {"unstable": "#d7301f", "stable": "#2b8cbe"}


def svg_heatmap(labels, x_axis, y_axis, title="") -> str:
    """Cells coloured by class; labels has shape (len(x), len(y))."""
    labels = np.asarray(labels, dtype=object)
    if labels.ndim == 1:
        labels = labels[:, None]
    nx, ny = labels.shape
    cw = (_W - 2 * _M) / nx
    ch = (_H - 2 * _M) / ny
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">']
    for i in range(nx):
        for j in range(ny):
            lab = labels[i, j]
            color = _COLORS.get(lab, "#999999" if lab.startswith("degenerate") else "#222222")
            y = _H - _M - (j + 1) * ch
            out.append(f'<rect x="{_M + i * cw:.3f}" y="{y:.3f}" width="{cw:.3f}" height="{ch:.3f}" fill="{color}"/>')
    xname, xlo, xhi = x_axis[:3]
    out.append(f'<text x="{_W / 2}" y="{_H - 15}" text-anchor="middle" font-size="14">{escape(xname)} ∈ [{fmt(xlo)}, {fmt(xhi)}]</text>')
    if y_axis is not None:
        yname, ylo, yhi = y_axis[:3]
        out.append(
            f'<text x="18" y="{_H / 2}" text-anchor="middle" font-size="14" transform="rotate(-90 18 {_H / 2})">'
            f"{escape(yname)} ∈ [{fmt(ylo)}, {fmt(yhi)}]</text>"
        )
    if title:
        out.append(f'<text x="{_W / 2}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
