"""Three eigenvalue bound sets for Moran's index.

1. Rayleigh quotient of nW:           lam_min(nW) <= I <= lam_max(nW)
2. Rayleigh quotient of (nW)'(nW):    lam*_min <= I^2 + ((Wz)'o)^2 + sigma_e^2 <= lam*_max
3. Rank-one matrix n W'z z'W:         0 <= I^2 <= n (Wz)'Wz

The sets are combined into one interval for I by turning the two quadratic
constraints into symmetric intervals |I| <= sqrt(u). That conversion drops
the lower bounds of set 2 and set 3, which never cut an interval around 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import TOL
from .eigen import EigenDecomposition, symmetric_eigenvalues
from .errors import InputError
from .ingest import StandardizedVector
from .models import ModelFit
from .moran import MoranResult, moran_index
from .weights import WeightMatrix

__all__ = [
    "BoundsReport",
    "EigenDecomposition",
    "symmetric_eigenvalues",
    "rayleigh_quotient",
    "compute_bounds",
]


def rayleigh_quotient(m, v) -> float:
    """v'Mv / v'v."""
    m = np.asarray(m, dtype=float)
    v = np.asarray(v, dtype=float)
    vv = float(v @ v)
    if vv == 0.0:
        raise InputError("Rayleigh quotient of the zero vector")
    return float(v @ (m @ v)) / vv


def _contains(lo: float, hi: float, x: float, slack: float) -> bool:
    return lo - slack <= x <= hi + slack


@dataclass(frozen=True)
class BoundsReport:
    index: float
    set1: tuple[float, float]
    set2: tuple[float, float]
    set3: tuple[float, float]
    # quantities tested against each set
    set2_quantity: float  # I^2 + ((Wz)'o)^2 + sigma_e^2
    set2_theoretical_quantity: float  # I^2 + ((Wz)'o)^2, error-free form
    set3_quantity: float  # I^2
    intersection_interval_for_I: tuple[float, float]
    satisfied: dict
    # max |eig((nW)'(nW)) - eig(nW)^2| over the sorted multisets
    spectral_crosscheck: float

    @property
    def attainment(self) -> dict:
        lo, hi = self.set1
        return {"I_minus_lambda_min": self.index - lo, "lambda_max_minus_I": hi - self.index}

    def position(self, slack: float = TOL.bounds_slack) -> dict:
        """Where I, I^2 and the set-2 quantity sit inside each set."""
        def where(lo, hi, x):
            if abs(x - lo) <= slack and abs(x - hi) <= slack:
                return "attains both bounds"
            if abs(x - lo) <= slack:
                return "attains lower bound"
            if abs(x - hi) <= slack:
                return "attains upper bound"
            if lo < x < hi:
                return "strictly inside"
            return "outside"

        return {
            "set1": where(*self.set1, self.index),
            "set2": where(*self.set2, self.set2_quantity),
            "set3": where(*self.set3, self.set3_quantity),
        }

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "set1": list(self.set1),
            "set2": list(self.set2),
            "set3": list(self.set3),
            "set2_quantity": self.set2_quantity,
            "set2_theoretical_quantity": self.set2_theoretical_quantity,
            "set3_quantity": self.set3_quantity,
            "intersection_interval_for_I": list(self.intersection_interval_for_I),
            "intersection_note": (
                "quadratic constraints converted to |I| <= sqrt(u); "
                "their lower bounds are not represented in the interval"
            ),
            "satisfied": dict(self.satisfied),
            "attainment": self.attainment,
            "position": self.position(),
            "spectral_crosscheck": self.spectral_crosscheck,
        }


def compute_bounds(
    w: WeightMatrix,
    z: StandardizedVector,
    fit: ModelFit,
    moran: MoranResult | None = None,
    slack: float = TOL.bounds_slack,
) -> BoundsReport:
    """Evaluate the three bound sets for the with-intercept ``fit`` of (w, z)."""
    if not fit.with_intercept:
        raise InputError("bounds need the with-intercept fit")
    if w.n != z.n or fit.n != z.n:
        raise InputError("dimension mismatch between weights, vector and fit")
    m = moran if moran is not None else moran_index(w, z)
    n = m.n
    nw = n * w.w

    lam = symmetric_eigenvalues(nw).eigenvalues
    set1 = (float(lam[0]), float(lam[-1]))

    gram = nw.T @ nw
    lam_star = symmetric_eigenvalues(0.5 * (gram + gram.T)).eigenvalues
    squared = np.sort(lam ** 2)
    crosscheck = float(np.abs(lam_star - squared).max())
    set2 = (max(float(lam_star[0]), 0.0), float(lam_star[-1]))

    upper3 = n * m.lag_norm2
    set3 = (0.0, upper3)

    i2 = m.index ** 2
    a2 = m.lag_sum ** 2
    q2 = i2 + a2 + fit.sigma_e2

    u = min(set2[1] - a2 - fit.sigma_e2, upper3)
    r = math.sqrt(max(u, 0.0))
    interval = (max(set1[0], -r), min(set1[1], r))

    satisfied = {
        "set1": _contains(*set1, m.index, slack),
        "set2": _contains(*set2, q2, slack),
        "set3": _contains(*set3, i2, slack),
    }
    return BoundsReport(
        index=m.index,
        set1=set1,
        set2=set2,
        set3=set3,
        set2_quantity=q2,
        set2_theoretical_quantity=i2 + a2,
        set3_quantity=i2,
        intersection_interval_for_I=interval,
        satisfied=satisfied,
        spectral_crosscheck=crosscheck,
    )
