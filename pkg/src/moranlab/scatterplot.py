"""Normalized Moran scatterplot: points (z_i, (nWz)_i) and two trend lines.

The standard line passes through the origin with slope I (the outer-product
equation and the zero-intercept regression give the same line). The second
line has the same slope and intercept (Wz)'o, the mean of nWz.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .constants import FLOAT_DIGITS
from .errors import InputError
from .ingest import StandardizedVector
from .models import ModelFit
from .moran import moran_index
from .weights import WeightMatrix

QUADRANTS = ("HH", "LH", "LL", "HL")

PAD = 0.10
MARGIN = 60
POINT_RADIUS = 4
POINT_COLOR = "#1f77b4"
STANDARD_COLOR = "#d62728"
INTERCEPT_COLOR = "#2ca02c"


def fmt(x: float) -> str:
    return format(float(x), f".{FLOAT_DIGITS}g")


def _legend_num(x: float) -> str:
    # avoid printing -0.0000
    return f"{round(float(x), 4) + 0.0:.4f}"


def quadrant(x: float, y: float) -> str:
    """Anselin quadrant; a point on an axis goes to the lowest-numbered adjacent quadrant."""
    xs = (x > 0, x < 0) if x != 0 else (True, True)
    ys = (y > 0, y < 0) if y != 0 else (True, True)
    candidates = []
    if xs[0] and ys[0]:
        candidates.append(0)  # HH
    if xs[1] and ys[0]:
        candidates.append(1)  # LH
    if xs[1] and ys[1]:
        candidates.append(2)  # LL
    if xs[0] and ys[1]:
        candidates.append(3)  # HL
    return QUADRANTS[min(candidates)]


@dataclass(frozen=True)
class Line:
    slope: float
    intercept: float

    def __call__(self, x: float) -> float:
        return self.intercept + self.slope * x


@dataclass(frozen=True)
class ScatterplotSpec:
    points: tuple[tuple[float, float, str], ...]
    line_standard: Line
    line_intercept: Line
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    quadrant_counts: dict

    @property
    def n(self) -> int:
        return len(self.points)


def _symmetric_range(values: np.ndarray) -> tuple[float, float]:
    m = float(np.abs(values).max()) if values.size else 0.0
    half = m * (1.0 + PAD) if m > 0 else 1.0
    return (-half, half)


def build_scatterplot(
    w: WeightMatrix,
    z: StandardizedVector,
    fit_with: ModelFit,
    fit_without: ModelFit,
    ids: Sequence[str] | None = None,
) -> ScatterplotSpec:
    if w.n != z.n or fit_with.n != z.n or fit_without.n != z.n:
        raise InputError("dimension mismatch between weights, vector and fits")
    if not fit_with.with_intercept or fit_without.with_intercept:
        raise InputError("expected one with-intercept and one zero-intercept fit")
    ids = list(ids) if ids is not None else [str(i + 1) for i in range(z.n)]
    if len(ids) != z.n:
        raise InputError(f"{len(ids)} ids for {z.n} points")
    y = moran_index(w, z).scaled_lag
    x = z.z
    points = tuple((float(a), float(b), str(i)) for a, b, i in zip(x, y, ids))
    counts = {q: 0 for q in QUADRANTS}
    for a, b, _ in points:
        counts[quadrant(a, b)] += 1
    return ScatterplotSpec(
        points=points,
        line_standard=Line(fit_without.slope, 0.0),
        line_intercept=Line(fit_with.slope, fit_with.intercept),
        x_range=_symmetric_range(x),
        y_range=_symmetric_range(y),
        quadrant_counts=counts,
    )


def emit_csv(spec: ScatterplotSpec, path: str | Path) -> None:
    """Write ``id,z,n_wz,quadrant`` rows followed by a ``# slope=.. intercept=..`` trailer."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "z", "n_wz", "quadrant"])
        for x, y, uid in spec.points:
            w.writerow([uid, fmt(x), fmt(y), quadrant(x, y)])
        fh.write(f"# slope={fmt(spec.line_intercept.slope)} "
                 f"intercept={fmt(spec.line_intercept.intercept)}\n")


def _clip_segment(line: Line, xr, yr):
    """Portion of the line inside the data box, or None."""
    x0, x1 = xr
    y0, y1 = yr
    lo, hi = x0, x1
    if line.slope == 0.0:
        if not (y0 <= line.intercept <= y1):
            return None
    else:
        xa = (y0 - line.intercept) / line.slope
        xb = (y1 - line.intercept) / line.slope
        lo, hi = max(lo, min(xa, xb)), min(hi, max(xa, xb))
        if lo > hi:
            return None
    return (lo, line(lo)), (hi, line(hi))


def emit_svg(spec: ScatterplotSpec, path: str | Path, width_px: int = 640, height_px: int = 640) -> None:
    """Render the scatterplot as a standalone SVG 1.1 document.

    The standard (origin) trend line is solid, the intercept line dashed.
    Output is byte-deterministic for a given spec and size.
    """
    if width_px < 100 or height_px < 100:
        raise InputError(f"SVG size must be at least 100x100, got {width_px}x{height_px}")
    (x0, x1), (y0, y1) = spec.x_range, spec.y_range
    pw = width_px - 2 * MARGIN
    ph = height_px - 2 * MARGIN

    def px(x):
        return MARGIN + (x - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN + (y1 - y) / (y1 - y0) * ph

    def c(v):
        return f"{v:.2f}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width_px}" '
        f'height="{height_px}" viewBox="0 0 {width_px} {height_px}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
        f'<rect class="frame" x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" '
        'fill="none" stroke="#cccccc"/>',
        f'<line class="axis" x1="{c(px(x0))}" y1="{c(py(0))}" x2="{c(px(x1))}" y2="{c(py(0))}" '
        'stroke="#000000" stroke-width="1"/>',
        f'<line class="axis" x1="{c(px(0))}" y1="{c(py(y0))}" x2="{c(px(0))}" y2="{c(py(y1))}" '
        'stroke="#000000" stroke-width="1"/>',
        f'<text x="{width_px - MARGIN}" y="{c(py(0) - 6)}" text-anchor="end" '
        'font-family="sans-serif" font-size="12">z</text>',
        f'<text x="{c(px(0) + 6)}" y="{MARGIN + 12}" font-family="sans-serif" '
        'font-size="12">n&#183;Wz</text>',
    ]
    for line, cls, color, dash in (
        (spec.line_standard, "trend-standard", STANDARD_COLOR, ""),
        (spec.line_intercept, "trend-intercept", INTERCEPT_COLOR, ' stroke-dasharray="6,4"'),
    ):
        seg = _clip_segment(line, spec.x_range, spec.y_range)
        if seg is None:
            continue
        (ax, ay), (bx, by) = seg
        out.append(
            f'<line class="{cls}" x1="{c(px(ax))}" y1="{c(py(ay))}" x2="{c(px(bx))}" '
            f'y2="{c(py(by))}" stroke="{color}" stroke-width="2"{dash}/>'
        )
    for x, y, uid in spec.points:
        out.append(
            f'<circle class="point" cx="{c(px(x))}" cy="{c(py(y))}" r="{POINT_RADIUS}" '
            f'fill="{POINT_COLOR}" fill-opacity="0.8"><title>{escape(uid)}</title></circle>'
        )
    lx = MARGIN + 10
    ly = height_px - MARGIN + 20
    out += [
        f'<line x1="{lx}" y1="{ly}" x2="{lx + 30}" y2="{ly}" stroke="{STANDARD_COLOR}" stroke-width="2"/>',
        f'<text class="legend" x="{lx + 36}" y="{ly + 4}" font-family="sans-serif" font-size="12">'
        f'y = I z, I = {_legend_num(spec.line_standard.slope)}</text>',
        f'<line x1="{lx}" y1="{ly + 18}" x2="{lx + 30}" y2="{ly + 18}" stroke="{INTERCEPT_COLOR}" '
        'stroke-width="2" stroke-dasharray="6,4"/>',
        f'<text class="legend" x="{lx + 36}" y="{ly + 22}" font-family="sans-serif" font-size="12">'
        f'y = a + I z, a = {_legend_num(spec.line_intercept.intercept)}</text>',
        "</svg>",
    ]
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
