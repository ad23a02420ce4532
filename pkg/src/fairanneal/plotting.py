"""Self-contained SVG line plots of sweep tables (no rendering dependency).

The layout mirrors the usual probability-vs-annealing-time figure: log-scaled
tau on x, probability in [0, 1] on y, one polyline per configuration label,
optional dashed reference lines (e.g. at 1/3 and 1/2).
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Sequence

__all__ = ["PlotError", "load_sweep_csv", "render_sweep_svg", "plot_csv"]

REQUIRED_COLUMNS = {"protocol", "tau", "config_label", "probability"}

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f")

_W, _H = 640.0, 440.0
_L, _R, _T, _B = 70.0, 170.0, 40.0, 55.0  # margins; right holds the legend


class PlotError(ValueError):
    """CSV schema problems or nothing to plot."""


def load_sweep_csv(path: str | Path) -> list[dict[str, str]]:
    """Read a sweep CSV, checking the schema and dropping error rows."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise PlotError(f"{path}: empty file, nothing to plot")
        missing = REQUIRED_COLUMNS - set(reader.fieldnames)
        if missing:
            raise PlotError(f"{path}: missing columns {sorted(missing)}")
        rows = [r for r in reader if not r["config_label"].startswith("__error__")]
    if not rows:
        raise PlotError(f"{path}: no data rows, nothing to plot")
    return rows


def _series(rows: Iterable[dict[str, str]]) -> dict[str, list[tuple[float, float]]]:
    series: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        try:
            tau = float(row["tau"])
            prob = float(row["probability"])
        except ValueError as exc:
            raise PlotError(f"bad numeric cell in row {row}: {exc}")
        series.setdefault(row["config_label"], []).append((tau, prob))
    for pts in series.values():
        pts.sort()
    return series


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def render_sweep_svg(rows: Sequence[dict[str, str]], title: str = "",
                     reference_lines: Sequence[float] = ()) -> str:
    """Build the SVG document text for a sweep table."""
    series = _series(rows)
    taus = [t for pts in series.values() for t, _ in pts]
    lo, hi = min(taus), max(taus)
    if lo <= 0:
        raise PlotError("tau values must be positive for a log axis")
    x0, x1 = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
    if x1 == x0:
        x1 = x0 + 1

    def xpix(tau: float) -> float:
        return _L + (math.log10(tau) - x0) / (x1 - x0) * (_W - _L - _R)

    def ypix(p: float) -> float:
        return _H - _B - p * (_H - _T - _B)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
           f'width="{_W:g}" height="{_H:g}" viewBox="0 0 {_W:g} {_H:g}">',
           f'<rect width="{_W:g}" height="{_H:g}" fill="white"/>']
    if title:
        out.append(f'<text x="{_fmt(_L + (_W - _L - _R) / 2)}" y="24" '
                   f'font-family="sans-serif" font-size="15" '
                   f'text-anchor="middle">{_escape(title)}</text>')
    # axes
    out.append(f'<rect x="{_fmt(_L)}" y="{_fmt(_T)}" width="{_fmt(_W - _L - _R)}" '
               f'height="{_fmt(_H - _T - _B)}" fill="none" stroke="black"/>')
    for d in range(x0, x1 + 1):
        x = xpix(10.0 ** d)
        out.append(f'<line x1="{_fmt(x)}" y1="{_fmt(_H - _B)}" x2="{_fmt(x)}" '
                   f'y2="{_fmt(_H - _B + 5)}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(_H - _B + 18)}" '
                   f'font-family="sans-serif" font-size="11" '
                   f'text-anchor="middle">1e{d}</text>')
    for k in range(6):
        p = k / 5.0
        y = ypix(p)
        out.append(f'<line x1="{_fmt(_L - 5)}" y1="{_fmt(y)}" x2="{_fmt(_L)}" '
                   f'y2="{_fmt(y)}" stroke="black"/>')
        out.append(f'<text x="{_fmt(_L - 8)}" y="{_fmt(y + 4)}" '
                   f'font-family="sans-serif" font-size="11" '
                   f'text-anchor="end">{p:.1f}</text>')
    out.append(f'<text x="{_fmt(_L + (_W - _L - _R) / 2)}" y="{_fmt(_H - 12)}" '
               f'font-family="sans-serif" font-size="13" '
               f'text-anchor="middle">annealing time</text>')
    out.append(f'<text x="18" y="{_fmt(_T + (_H - _T - _B) / 2)}" '
               f'font-family="sans-serif" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 18 {_fmt(_T + (_H - _T - _B) / 2)})">'
               f'probability</text>')
    for ref in reference_lines:
        y = ypix(ref)
        out.append(f'<line x1="{_fmt(_L)}" y1="{_fmt(y)}" x2="{_fmt(_W - _R)}" '
                   f'y2="{_fmt(y)}" stroke="#999999" stroke-dasharray="6 4"/>')
        out.append(f'<text x="{_fmt(_W - _R + 4)}" y="{_fmt(y + 4)}" '
                   f'font-family="sans-serif" font-size="10" '
                   f'fill="#666666">{ref:g}</text>')
    # series + legend, label order fixed by sorted() for deterministic output
    for idx, label in enumerate(sorted(series)):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{_fmt(xpix(t))},{_fmt(ypix(min(max(p, 0.0), 1.0)))}"
                       for t, p in series[label])
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.8"/>')
        ly = _T + 16 + 18 * idx
        out.append(f'<line x1="{_fmt(_W - _R + 12)}" y1="{_fmt(ly - 4)}" '
                   f'x2="{_fmt(_W - _R + 34)}" y2="{_fmt(ly - 4)}" '
                   f'stroke="{color}" stroke-width="1.8"/>')
        out.append(f'<text x="{_fmt(_W - _R + 40)}" y="{_fmt(ly)}" '
                   f'font-family="monospace" font-size="11">{_escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))


def plot_csv(csv_path: str | Path, out_path: str | Path, title: str = "",
             reference_lines: Sequence[float] = ()) -> None:
    """Render a sweep CSV to a self-contained SVG file."""
    rows = load_sweep_csv(csv_path)
    svg = render_sweep_svg(rows, title=title, reference_lines=reference_lines)
    Path(out_path).write_text(svg)
