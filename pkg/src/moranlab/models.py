"""Regression of n*Wz on z, with and without a constant term.

The with-intercept model ``nWz = a o + b z + e`` is estimated by four
routes that must agree: the univariate closed form, the 2x2 normal
equations, Cramer's rule on the moment equations, and a generic pivoted
least-squares solve. The zero-intercept model ``nWz = b z + e*`` has a
single closed form. In both, the slope equals Moran's index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import betainc

from .constants import TOL
from .errors import InputError, NumericalError
from .ingest import StandardizedVector
from .moran import MoranResult, moran_index
from .weights import WeightMatrix

ROUTES = ("closed_form", "normal_equations", "cramer", "generic_ls")

R2_CENTERED = "centered"
R2_UNCENTERED = "uncentered"


@dataclass(frozen=True)
class ModelFit:
    intercept: float
    slope: float
    residuals: np.ndarray
    gamma: float
    sigma_e2: float
    r_squared: float
    route: str
    with_intercept: bool
    r2_convention: str
    notes: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.residuals.size

    @property
    def model(self) -> str:
        return "with_intercept" if self.with_intercept else "zero_intercept"


def _prepare(w: WeightMatrix, z: StandardizedVector, moran: MoranResult | None) -> MoranResult:
    if w.n != z.n:
        raise InputError(f"dimension mismatch: W is {w.n}x{w.n}, z has length {z.n}")
    return moran if moran is not None else moran_index(w, z)


def _r2(y: np.ndarray, e: np.ndarray, with_intercept: bool) -> float:
    if with_intercept:
        d = y - y.mean()
        sst = float(d @ d)
    else:
        sst = float(y @ y)
    if sst == 0.0:
        return math.nan
    return 1.0 - float(e @ e) / sst


def _make_fit(a, b, y, z, m: MoranResult, route, with_intercept, notes=()) -> ModelFit:
    e = y - a - b * z
    e.setflags(write=False)
    return ModelFit(
        intercept=float(a),
        slope=float(b),
        residuals=e,
        gamma=float(m.lag @ e),
        sigma_e2=float(e @ e) / e.size,
        r_squared=_r2(y, e, with_intercept),
        route=route,
        with_intercept=with_intercept,
        r2_convention=R2_CENTERED if with_intercept else R2_UNCENTERED,
        notes=tuple(notes),
    )


def _closed_form(y: np.ndarray, z: np.ndarray) -> tuple[float, float]:
    ybar = y.mean()
    zbar = z.mean()
    b = (float(z @ y) - ybar * z.sum()) / float(z @ z - zbar * z.sum())
    return ybar - b * zbar, b


def _normal_equations(y: np.ndarray, z: np.ndarray) -> tuple[float, float]:
    n = z.size
    ones = np.ones(n)
    g11, g12, g22 = float(ones @ ones), float(ones @ z), float(z @ z)
    det = g11 * g22 - g12 * g12
    if det < TOL.singular * n * n:
        raise NumericalError(f"normal matrix is near-singular (det={det:.3e})")
    r1, r2 = float(ones @ y), float(z @ y)
    # explicit 2x2 inverse
    a = (g22 * r1 - g12 * r2) / det
    b = (-g12 * r1 + g11 * r2) / det
    return a, b


def _det2(m) -> float:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def intercept_from_identity(n: int, lag_norm2: float, index: float, sigma_e2: float,
                            lag_sum: float) -> float:
    """a = (n (Wz)'Wz - I^2 - sigma_e^2) / (Wz)'o."""
    return (n * lag_norm2 - index ** 2 - sigma_e2) / lag_sum


def lag_sum_squared_from_identity(n: int, lag_norm2: float, index: float, sigma_e2: float) -> float:
    """((Wz)'o)^2 recovered as n (Wz)'Wz - I^2 - sigma_e^2."""
    return n * lag_norm2 - index ** 2 - sigma_e2


def _cramer(y: np.ndarray, z: np.ndarray, m: MoranResult) -> tuple[float, float, list[str]]:
    n = m.n
    # gamma needs residuals: take them from a provisional closed-form fit
    a0, b0 = _closed_form(y, z)
    gamma = float(m.lag @ (y - a0 - b0 * z))
    rhs2 = n * m.lag_norm2 - gamma
    det_a = _det2([[n * m.index, n], [rhs2, m.index]])
    det_b = _det2([[0.0, n * m.index], [m.lag_sum, rhs2]])
    det_c = _det2([[0.0, n], [m.lag_sum, m.index]])
    scale = max(n * m.lag_norm2, m.index ** 2, np.finfo(float).tiny)
    if abs(det_c) <= TOL.cramer_degenerate * n * math.sqrt(scale):
        # (Wz)'o ~ 0: the moment system leaves a undetermined; B/C reduces to I
        return m.lag_sum, m.index, [
            "cramer: determinant C vanishes with (Wz)'o; intercept taken as (Wz)'o"
        ]
    return det_a / det_c, det_b / det_c, []


def _solve_pivoted(g: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting."""
    a = np.array(g, dtype=float)
    x = np.array(r, dtype=float)
    k = a.shape[0]
    scale = max(float(np.abs(a).max()), np.finfo(float).tiny)
    for col in range(k):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[piv, col]) <= TOL.singular * scale:
            raise NumericalError("singular normal matrix in least-squares solve")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            x[[col, piv]] = x[[piv, col]]
        for row in range(col + 1, k):
            f = a[row, col] / a[col, col]
            a[row, col:] -= f * a[col, col:]
            x[row] -= f * x[col]
    for col in range(k - 1, -1, -1):
        x[col] = (x[col] - a[col, col + 1:] @ x[col + 1:]) / a[col, col]
    return x


def _generic_ls(y: np.ndarray, z: np.ndarray) -> tuple[float, float]:
    design = np.column_stack([np.ones_like(z), z])
    coef = _solve_pivoted(design.T @ design, design.T @ y)
    return float(coef[0]), float(coef[1])


def fit_with_intercept(
    w: WeightMatrix,
    z: StandardizedVector,
    route: str = "closed_form",
    moran: MoranResult | None = None,
) -> ModelFit:
    """Least-squares fit of ``nWz = a o + b z + e``."""
    m = _prepare(w, z, moran)
    if z.n < 3:
        raise InputError("need n >= 3 for the with-intercept model")
    y = m.scaled_lag
    zz = z.z
    if float(zz @ zz) == 0.0:
        raise NumericalError("degenerate design: z'z = 0")
    notes: list[str] = []
    if route == "closed_form":
        a, b = _closed_form(y, zz)
    elif route == "normal_equations":
        a, b = _normal_equations(y, zz)
    elif route == "cramer":
        a, b, notes = _cramer(y, zz, m)
    elif route == "generic_ls":
        a, b = _generic_ls(y, zz)
    else:
        raise InputError(f"unknown route {route!r}; expected one of {', '.join(ROUTES)}")
    return _make_fit(a, b, y, zz, m, route, True, notes)


def fit_without_intercept(
    w: WeightMatrix,
    z: StandardizedVector,
    moran: MoranResult | None = None,
) -> ModelFit:
    """Regression through the origin, ``nWz = b z + e*`` with b = z'(nWz)/z'z."""
    m = _prepare(w, z, moran)
    y = m.scaled_lag
    zz = z.z
    b = float(zz @ y) / float(zz @ zz)
    return _make_fit(0.0, b, y, zz, m, "closed_form", False)


@dataclass(frozen=True)
class RouteComparison:
    fits: tuple[ModelFit, ...]
    max_param_spread: float = field(init=False)

    def __post_init__(self):
        a = np.array([f.intercept for f in self.fits])
        b = np.array([f.slope for f in self.fits])
        spread = max(float(a.max() - a.min()), float(b.max() - b.min())) if self.fits else 0.0
        object.__setattr__(self, "max_param_spread", spread)

    def by_route(self, route: str) -> ModelFit:
        for f in self.fits:
            if f.route == route:
                return f
        raise KeyError(route)


def compare_routes(
    w: WeightMatrix,
    z: StandardizedVector,
    routes: Iterable[str] = ROUTES,
    moran: MoranResult | None = None,
) -> RouteComparison:
    m = _prepare(w, z, moran)
    return RouteComparison(tuple(fit_with_intercept(w, z, r, moran=m) for r in routes))


@dataclass(frozen=True)
class ResidualDiagnostics:
    """Recomputed residual quantities and the residual of each identity.

    Identity residuals that do not apply to the zero-intercept model are None.
    """

    gamma: float
    sigma_e2: float
    eq9_z: float  # |z'e|
    eq9_o: float | None  # |o'e|
    eq23: float | None  # |gamma - sigma_e^2|
    eq24: float | None  # |n(Wz)'Wz - I^2 - sigma_e^2 - ((Wz)'o)^2|
    b2: float | None  # |e'e/n - (n(Wz)'Wz - ((Wz)'o)^2 - I^2)|

    def as_dict(self) -> dict:
        return {"eq9_z": self.eq9_z, "eq9_o": self.eq9_o, "eq23": self.eq23,
                "eq24": self.eq24, "b2": self.b2}


def residual_diagnostics(fit: ModelFit, w: WeightMatrix, z: StandardizedVector,
                         moran: MoranResult | None = None) -> ResidualDiagnostics:
    m = _prepare(w, z, moran)
    e = np.asarray(fit.residuals)
    if e.shape != (m.n,):
        raise InputError("fit does not match these inputs")
    n = m.n
    gamma = float(m.lag @ e)
    sigma_e2 = float(e @ e) / n
    eq9_z = abs(float(z.z @ e))
    if not fit.with_intercept:
        return ResidualDiagnostics(gamma, sigma_e2, eq9_z, None, None, None, None)
    rhs = n * m.lag_norm2 - m.lag_sum ** 2 - m.index ** 2
    return ResidualDiagnostics(
        gamma=gamma,
        sigma_e2=sigma_e2,
        eq9_z=eq9_z,
        eq9_o=abs(float(e.sum())),
        eq23=abs(gamma - sigma_e2),
        eq24=abs(n * m.lag_norm2 - m.index ** 2 - sigma_e2 - m.lag_sum ** 2),
        b2=abs(sigma_e2 - rhs),
    )


def r_squared(fit: ModelFit, y) -> float:
    """Coefficient of determination of ``fit`` against ``y = nWz``.

    The with-intercept model uses the centered total sum of squares; the
    zero-intercept model uses the uncentered one, sum(y^2), as is usual for
    regression through the origin.
    """
    y = np.asarray(y, dtype=float)
    e = np.asarray(fit.residuals)
    if y.shape != e.shape:
        raise InputError("y does not match the fit")
    r2 = _r2(y, e, fit.with_intercept)
    if math.isnan(r2):
        raise NumericalError("total sum of squares is zero (constant y)")
    return r2


def t_two_sided_pvalue(t: float, df: float) -> float:
    """Two-sided Student-t tail probability P(|T| >= |t|)."""
    if df <= 0:
        raise InputError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0
    if math.isnan(t):
        return 1.0
    return float(betainc(0.5 * df, 0.5, df / (df + t * t)))


@dataclass(frozen=True)
class CoefficientTests:
    df: int
    se_intercept: float | None
    se_slope: float
    t_intercept: float | None
    t_slope: float
    p_intercept: float | None
    p_slope: float


def _t_stat(coef: float, se: float) -> float:
    if se == 0.0:
        return math.nan if coef == 0.0 else math.copysign(math.inf, coef)
    return coef / se


def coefficient_tests_from_moments(
    n: int, sse: float, gram: Sequence[Sequence[float]], coefs: Sequence[float]
) -> tuple[int, list[float], list[float], list[float]]:
    """Classical OLS t-tests from the Gram matrix X'X and the residual sum of squares."""
    k = len(coefs)
    df = n - k
    if df < 1:
        raise InputError(f"insufficient degrees of freedom: n={n}, parameters={k}")
    s2 = sse / df
    cov = s2 * np.linalg.inv(np.asarray(gram, dtype=float))
    se = [math.sqrt(max(float(cov[i, i]), 0.0)) for i in range(k)]
    t = [_t_stat(float(c), s) for c, s in zip(coefs, se)]
    p = [t_two_sided_pvalue(ti, df) for ti in t]
    return df, se, t, p


def coefficient_p_values(fit: ModelFit, y, z: StandardizedVector | np.ndarray | None = None) -> CoefficientTests:
    """Two-sided t-test p-values for the fitted coefficients.

    The regressor z is reconstructed from ``y - e`` when not supplied. These
    are classical OLS tests and ignore the spatial dependence of the data.
    """
    y = np.asarray(y, dtype=float)
    e = np.asarray(fit.residuals)
    if y.shape != e.shape:
        raise InputError("y does not match the fit")
    n = y.size
    if z is None:
        if fit.slope == 0.0:
            raise InputError("z is required when the slope is zero")
        zz = (y - e - fit.intercept) / fit.slope
    else:
        zz = z.z if isinstance(z, StandardizedVector) else np.asarray(z, dtype=float)
    sse = float(e @ e)
    if fit.with_intercept:
        design = np.column_stack([np.ones(n), zz])
        df, se, t, p = coefficient_tests_from_moments(
            n, sse, design.T @ design, [fit.intercept, fit.slope])
        return CoefficientTests(df, se[0], se[1], t[0], t[1], p[0], p[1])
    df, se, t, p = coefficient_tests_from_moments(n, sse, [[float(zz @ zz)]], [fit.slope])
    return CoefficientTests(df, None, se[0], None, t[0], None, p[0])


def fit_report(fit: ModelFit, w: WeightMatrix, z: StandardizedVector,
               moran: MoranResult | None = None) -> dict:
    """JSON-ready summary of one fit."""
    m = _prepare(w, z, moran)
    diag = residual_diagnostics(fit, w, z, moran=m)
    tests = coefficient_p_values(fit, m.scaled_lag, z)
    ids = diag.as_dict()
    return {
        "n": m.n,
        "model": fit.model,
        "route": fit.route,
        "a": fit.intercept,
        "b_moran": fit.slope,
        "gamma": fit.gamma,
        "sigma_e2": fit.sigma_e2,
        "r2": fit.r_squared,
        "r2_convention": fit.r2_convention,
        "p_intercept": tests.p_intercept,
        "p_slope": tests.p_slope,
        "p_value_test": "classical OLS t-test (not robust to spatial dependence)",
        "identity_residuals": {k: ids[k] for k in ("eq9_z", "eq9_o", "eq23", "eq24")},
        "notes": list(fit.notes),
    }
