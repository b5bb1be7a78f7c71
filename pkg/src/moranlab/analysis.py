"""End-to-end pipeline: ingest, standardize, weights, fits, bounds, plot, report."""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .bounds import BoundsReport, compute_bounds
from .constants import FLOAT_DIGITS, TOL
from .errors import InputError
from .ingest import (
    AttributeTable,
    DistanceMatrix,
    StandardizedVector,
    load_attribute_table,
    load_distance_matrix,
    standardize,
)
from .models import (
    ROUTES,
    ModelFit,
    RouteComparison,
    compare_routes,
    fit_report,
    fit_without_intercept,
    residual_diagnostics,
)
from .moran import GetisOrdResult, MoranResult, getis_ord_index, moran_index, outer_product_check
from .scatterplot import ScatterplotSpec, build_scatterplot, emit_csv, emit_svg
from .weights import WeightMatrix, load_weight_matrix, weights_from_distances

SCHEMA_VERSION = 1
EMIT_CHOICES = ("json", "csv", "svg")


@dataclass
class AnalysisConfig:
    attribute_path: str | None = None
    distance_path: str | None = None
    column: str | None = None
    log_transform: bool = False
    routes: tuple[str, ...] = ROUTES
    output_dir: str = "."
    emit: tuple[str, ...] = EMIT_CHOICES
    weights_path: str | None = None
    getis: bool = False
    svg_width: int = 640
    svg_height: int = 640

    def validate(self) -> None:
        unknown = [r for r in self.routes if r not in ROUTES]
        if unknown or not self.routes:
            raise InputError(f"unknown route(s) {unknown}; choose from {', '.join(ROUTES)}")
        bad = [e for e in self.emit if e not in EMIT_CHOICES]
        if bad:
            raise InputError(f"unknown emit target(s) {bad}; choose from {', '.join(EMIT_CHOICES)}")
        if "svg" in self.emit and (self.svg_width < 100 or self.svg_height < 100):
            raise InputError(f"SVG size must be at least 100x100, got {self.svg_width}x{self.svg_height}")
        if self.attribute_path is None:
            raise InputError("an attribute table (--values) is required")
        if (self.distance_path is None) == (self.weights_path is None):
            raise InputError("give exactly one of --distances or --weights")
        inputs = {Path(p).resolve() for p in (self.attribute_path, self.distance_path,
                                               self.weights_path) if p}
        outputs = {Path(self.output_dir, name).resolve() for name in OUTPUT_NAMES.values()}
        clash = inputs & outputs
        if clash:
            raise InputError(f"output would overwrite input {sorted(map(str, clash))[0]}")


OUTPUT_NAMES = {"json": "report.json", "csv": "scatter.csv", "svg": "scatter.svg"}


@dataclass
class Dataset:
    ids: tuple[str, ...]
    values: np.ndarray
    z: StandardizedVector
    w: WeightMatrix


def _aligned_weights(ids: tuple[str, ...], w_ids, matrix: np.ndarray) -> np.ndarray:
    if tuple(w_ids) == tuple(ids):
        return matrix
    if set(w_ids) != set(ids) or len(w_ids) != len(ids):
        extra = sorted(set(w_ids) ^ set(ids))
        raise InputError(f"attribute ids and matrix ids differ (e.g. {extra[:3]})")
    pos = {u: k for k, u in enumerate(w_ids)}
    perm = [pos[u] for u in ids]
    return matrix[np.ix_(perm, perm)]


def prepare_dataset(
    table: AttributeTable,
    column: str,
    log_transform: bool = False,
    distances: DistanceMatrix | None = None,
    weights: WeightMatrix | None = None,
) -> Dataset:
    values = table.column(column)
    z = standardize(values, log_transform=log_transform, source_column=column)
    if distances is not None:
        r = _aligned_weights(table.ids, distances.ids, distances.r)
        w = weights_from_distances(DistanceMatrix(table.ids, r))
    elif weights is not None:
        ids = weights.ids or table.ids
        w = WeightMatrix(_aligned_weights(table.ids, ids, weights.w), ids=table.ids)
    else:
        raise InputError("need distances or weights")
    return Dataset(table.ids, values, z, w)


def load_dataset(config: AnalysisConfig) -> Dataset:
    config.validate()
    table = load_attribute_table(config.attribute_path)
    if config.column is None:
        if len(table.columns) != 1:
            raise InputError(f"--column is required (table has columns {', '.join(table.columns)})")
        column = next(iter(table.columns))
    else:
        column = config.column
    if config.distance_path is not None:
        return prepare_dataset(table, column, config.log_transform,
                               distances=load_distance_matrix(config.distance_path))
    return prepare_dataset(table, column, config.log_transform,
                           weights=load_weight_matrix(config.weights_path))


# ---------------------------------------------------------------------------
# identity checks


@dataclass(frozen=True)
class Check:
    name: str
    description: str
    residual: float
    tolerance: float = TOL.identity

    @property
    def passed(self) -> bool:
        return math.isfinite(self.residual) and self.residual <= self.tolerance


@dataclass
class Analysis:
    dataset: Dataset
    moran: MoranResult
    routes: RouteComparison
    zero_intercept: ModelFit
    bounds: BoundsReport
    scatter: ScatterplotSpec
    getis: GetisOrdResult | None
    checks: list[Check] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)


def _violation(lo: float, hi: float, x: float) -> float:
    return max(lo - x, x - hi, 0.0)


def identity_checks(ds: Dataset, m: MoranResult, routes: RouteComparison, zero: ModelFit,
                    bounds: BoundsReport, getis: GetisOrdResult | None) -> list[Check]:
    z = ds.z.z
    n = ds.z.n
    diags = [residual_diagnostics(f, ds.w, ds.z, moran=m) for f in routes.fits]
    y = m.scaled_lag
    outer = outer_product_check(ds.w, ds.z)
    checks = [
        Check("eq2", "sum(z) = 0 and z'z = o'o = n",
              max(abs(float(z.sum())), abs(float(z @ z) - n))),
        Check("eq9", "z'e = 0 and o'e = 0 (with intercept, every route)",
              max(max(d.eq9_z, d.eq9_o) for d in diags)),
        Check("eq13_18", "slope with intercept = slope without = z'Wz",
              max(max(abs(f.slope - zero.slope), abs(f.slope - m.index)) for f in routes.fits)),
        Check("eq16", "intercept = (Wz)'o = mean(nWz)",
              max(max(abs(f.intercept - m.lag_sum) for f in routes.fits),
                  abs(m.lag_sum - float(y.mean())))),
        Check("eq23", "gamma = (Wz)'e = e'e/n",
              max(d.eq23 for d in diags)),
        Check("eq24", "n(Wz)'Wz - I^2 - sigma_e^2 = ((Wz)'o)^2",
              max(d.eq24 for d in diags)),
        Check("b2", "e'e/n = n(Wz)'Wz - ((Wz)'o)^2 - I^2",
              max(d.b2 for d in diags)),
        Check("outer_product", "z z'W z = I z; I is the only nonzero eigenvalue of z z'W",
              outer.max_residual),
        Check("eq30", "lambda_min(nW) <= I <= lambda_max(nW)",
              _violation(*bounds.set1, bounds.index), TOL.bounds_slack),
        Check("eq33", "lambda*_min <= I^2 + ((Wz)'o)^2 + sigma_e^2 <= lambda*_max",
              _violation(*bounds.set2, bounds.set2_quantity), TOL.bounds_slack),
        Check("eq36", "0 <= I^2 <= n(Wz)'Wz",
              _violation(*bounds.set3, bounds.set3_quantity), TOL.bounds_slack),
    ]
    if getis is not None:
        checks.append(Check("table4_getis", "p p'Wp = G p with p = x/||x||",
                            max(getis.outer_residual, getis.inner_residual)))
    return checks


def analyze_dataset(ds: Dataset, routes=ROUTES, getis: bool = False) -> Analysis:
    m = moran_index(ds.w, ds.z)
    comparison = compare_routes(ds.w, ds.z, routes, moran=m)
    zero = fit_without_intercept(ds.w, ds.z, moran=m)
    fit = comparison.fits[0]
    bounds = compute_bounds(ds.w, ds.z, fit, moran=m)
    scatter = build_scatterplot(ds.w, ds.z, fit, zero, ds.ids)
    g = getis_ord_index(ds.w, ds.values) if getis else None
    checks = identity_checks(ds, m, comparison, zero, bounds, g)
    return Analysis(ds, m, comparison, zero, bounds, scatter, g, checks)


# ---------------------------------------------------------------------------
# report


def _round(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        # canonical 12-significant-digit value; +0.0 folds -0.0
        return float(format(x, f".{FLOAT_DIGITS}g")) + 0.0
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_round(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def build_report(a: Analysis, config: AnalysisConfig | None = None) -> dict:
    ds = a.dataset
    fits = [fit_report(f, ds.w, ds.z, moran=a.moran) for f in a.routes.fits]
    fits.append(fit_report(a.zero_intercept, ds.w, ds.z, moran=a.moran))
    report = {
        "schema": SCHEMA_VERSION,
        "config": asdict(config) if config is not None else None,
        "tolerances": TOL.as_dict(),
        "n": ds.z.n,
        "ids": list(ds.ids),
        "standardization": {"column": ds.z.source_column, "log_applied": ds.z.log_applied},
        "moran": {
            "index": a.moran.index,
            "n": a.moran.n,
            "lag_sum": a.moran.lag_sum,
            "lag_norm2": a.moran.lag_norm2,
        },
        "fits": fits,
        "route_spread": a.routes.max_param_spread,
        "bounds": a.bounds.as_dict(),
        "scatterplot": {
            "quadrant_counts": a.scatter.quadrant_counts,
            "line_standard": {"slope": a.scatter.line_standard.slope, "intercept": 0.0},
            "line_intercept": {"slope": a.scatter.line_intercept.slope,
                               "intercept": a.scatter.line_intercept.intercept},
        },
        "identity_checks": {
            c.name: {"description": c.description, "residual": c.residual,
                     "tolerance": c.tolerance, "pass": c.passed}
            for c in a.checks
        },
        "all_pass": a.all_pass,
    }
    if a.getis is not None:
        report["getis_ord"] = {"index": a.getis.index, "zeta": a.getis.zeta,
                               "normalization": "p = x / ||x||_2"}
    return _round(report)


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def atomic_write(path: Path, writer: Callable[[Path], None]) -> None:
    """Write through a temporary file in the target directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    os.close(fd)
    try:
        writer(Path(tmp))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_outputs(a: Analysis, config: AnalysisConfig) -> list[Path]:
    out = Path(config.output_dir)
    written = []
    staged: list[tuple[Path, Callable[[Path], None]]] = []
    if "json" in config.emit:
        text = dumps_report(build_report(a, config))
        staged.append((out / OUTPUT_NAMES["json"], lambda p: p.write_text(text, encoding="utf-8")))
    if "csv" in config.emit:
        staged.append((out / OUTPUT_NAMES["csv"], lambda p: emit_csv(a.scatter, p)))
    if "svg" in config.emit:
        staged.append((out / OUTPUT_NAMES["svg"],
                       lambda p: emit_svg(a.scatter, p, config.svg_width, config.svg_height)))
    for path, writer in staged:
        atomic_write(path, writer)
        written.append(path)
    return written
