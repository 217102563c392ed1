"""Minimal standalone SVG line/scatter plots from CSV artifacts.

Output is deterministic: identical CSV input yields byte-identical SVG.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

__all__ = ["PlotSpec", "MissingColumnError", "EmptyDataError", "export_svg"]


class MissingColumnError(KeyError):
    pass


class EmptyDataError(ValueError):
    pass


@dataclass(frozen=True)
class PlotSpec:
    """What to plot from a CSV artifact."""

    x: str
    y: str
    yerr: str | None = None
    title: str = ""
    log_y: bool = False


_W, _H = 640, 480
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    value = first
    while value <= hi + 1e-9 * step:
        ticks.append(round(value, 12))
        value += step
    return ticks


def _fmt(value: float) -> str:
    return format(value, ".6g")


def export_svg(csv_path: str | Path, spec: PlotSpec, out_path: str | Path) -> Path:
    """Render one CSV column pair (plus optional error bars) to an SVG file.

    Raises :class:`MissingColumnError` if a named column is absent and
    :class:`EmptyDataError` (writing nothing) if the CSV has no data rows.
    """
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for name in filter(None, (spec.x, spec.y, spec.yerr)):
            if name not in fields:
                raise MissingColumnError(
                    f"column {name!r} not in {csv_path} (has {fields})")
        rows = [row for row in reader]
    if not rows:
        raise EmptyDataError(f"{csv_path} has no data rows")

    xs = [float(r[spec.x]) for r in rows]
    ys = [float(r[spec.y]) for r in rows]
    es = [float(r[spec.yerr]) for r in rows] if spec.yerr else [0.0] * len(xs)

    if spec.log_y:
        floor = min((y for y in ys if y > 0), default=1e-12) * 1e-3
        ys_plot = [math.log10(max(y, floor)) for y in ys]
        lo_hi = [math.log10(max(y - e, floor)) for y, e in zip(ys, es)], \
                [math.log10(max(y + e, floor)) for y, e in zip(ys, es)]
    else:
        ys_plot = ys
        lo_hi = [y - e for y, e in zip(ys, es)], [y + e for y, e in zip(ys, es)]

    x_lo, x_hi = min(xs), max(xs)
    y_lo = min(min(ys_plot), min(lo_hi[0]))
    y_hi = max(max(ys_plot), max(lo_hi[1]))
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(x: float) -> float:
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def sy(y: float) -> float:
        return _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{spec.title}</text>',
    ]
    axis = (f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" '
            'stroke="black"/>'
            f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" '
            'stroke="black"/>')
    parts.append(axis)
    for tick in _ticks(x_lo, x_hi):
        px = sx(tick)
        parts.append(f'<line x1="{px:.2f}" y1="{_H - _MB}" x2="{px:.2f}" '
                     f'y2="{_H - _MB + 5}" stroke="black"/>')
        parts.append(f'<text x="{px:.2f}" y="{_H - _MB + 18}" '
                     'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{_fmt(tick)}</text>')
    for tick in _ticks(y_lo, y_hi):
        py = sy(tick)
        label = f"1e{_fmt(tick)}" if spec.log_y else _fmt(tick)
        parts.append(f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" '
                     f'y2="{py:.2f}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py + 4:.2f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{label}</text>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.1f}" y="{_H - 12}" '
                 'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="13">{spec.x}</text>')
    parts.append(f'<text x="16" y="{(_MT + _H - _MB) / 2:.1f}" '
                 'text-anchor="middle" font-family="sans-serif" font-size="13" '
                 f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2:.1f})">'
                 f'{spec.y}</text>')

    if spec.yerr:
        for x, lo, hi in zip(xs, lo_hi[0], lo_hi[1]):
            px = sx(x)
            parts.append(f'<line x1="{px:.2f}" y1="{sy(lo):.2f}" x2="{px:.2f}" '
                         f'y2="{sy(hi):.2f}" stroke="#888888"/>')
    points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys_plot))
    parts.append(f'<polyline points="{points}" fill="none" stroke="#1f77b4" '
                 'stroke-width="1.5"/>')
    for x, y in zip(xs, ys_plot):
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" '
                     'fill="#1f77b4"/>')
    parts.append("</svg>")

    out = Path(out_path)
    out.write_text("\n".join(parts) + "\n")
    return out
