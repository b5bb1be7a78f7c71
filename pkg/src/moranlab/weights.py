"""Inverse-distance contiguity and globally normalized spatial weights."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .constants import TOL
from .errors import InputError
from .ingest import DistanceMatrix, StandardizedVector, load_square_csv, write_square_csv


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def _check_square_symmetric(m: np.ndarray, what: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"{what} is not square: shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{what} has non-finite entries")
    if np.any(np.diag(m) != 0.0):
        raise InputError(f"{what} has a nonzero diagonal")
    if np.any(m < 0.0):
        raise InputError(f"{what} has negative entries")
    scale = max(float(np.abs(m).max()), 1.0)
    if np.abs(m - m.T).max() > TOL.symmetry * scale:
        raise InputError(f"{what} is not symmetric")


@dataclass(frozen=True)
class ContiguityMatrix:
    v: np.ndarray
    v0: float = field(init=False)

    def __post_init__(self):
        v = _frozen(self.v)
        _check_square_symmetric(v, "contiguity matrix")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "v0", float(v.sum()))

    @property
    def n(self) -> int:
        return self.v.shape[0]


@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric, non-negative, zero-diagonal weights summing to one."""

    w: np.ndarray
    ids: tuple[str, ...] | None = None
    n: int = field(init=False)

    def __post_init__(self):
        w = _frozen(self.w)
        _check_square_symmetric(w, "weight matrix")
        total = float(w.sum())
        if abs(total - 1.0) > TOL.weight_sum:
            raise InputError(f"weight matrix is not globally normalized: sum = {total!r}")
        if self.ids is not None:
            if len(self.ids) != w.shape[0]:
                raise InputError(f"{len(self.ids)} ids for a {w.shape[0]}x{w.shape[0]} weight matrix")
            object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "n", w.shape[0])

    @classmethod
    def uniform(cls, n: int) -> "WeightMatrix":
        """Equal weight 1/(n(n-1)) on every off-diagonal cell."""
        w = np.full((n, n), 1.0 / (n * (n - 1)))
        np.fill_diagonal(w, 0.0)
        return cls(w)


def inverse_distance_contiguity(d: DistanceMatrix) -> ContiguityMatrix:
    r = d.r
    v = np.zeros_like(r)
    off = ~np.eye(d.n, dtype=bool)
    v[off] = 1.0 / r[off]
    return ContiguityMatrix(v)


def normalize_global(v: ContiguityMatrix, ids: Sequence[str] | None = None) -> WeightMatrix:
    if not v.v0 > 0.0:
        raise InputError("contiguity matrix sums to zero; cannot normalize")
    return WeightMatrix(v.v / v.v0, ids=tuple(ids) if ids is not None else None)


def weights_from_distances(d: DistanceMatrix) -> WeightMatrix:
    return normalize_global(inverse_distance_contiguity(d), ids=d.ids)


def spatial_lag(w: WeightMatrix, z: StandardizedVector | np.ndarray) -> np.ndarray:
    """Matrix-vector product ``W z``; also accepts a plain vector."""
    vec = z.z if isinstance(z, StandardizedVector) else np.asarray(z, dtype=float)
    if vec.shape != (w.n,):
        raise InputError(f"dimension mismatch: W is {w.n}x{w.n}, vector has shape {vec.shape}")
    return w.w @ vec


def write_weight_matrix(w: WeightMatrix, path: str | Path, ids: Sequence[str] | None = None) -> None:
    ids = ids if ids is not None else (w.ids or [str(i + 1) for i in range(w.n)])
    write_square_csv(ids, w.w, path)


def load_weight_matrix(path: str | Path) -> WeightMatrix:
    ids, m = load_square_csv(path)
    try:
        return WeightMatrix(m, ids=ids)
    except InputError as exc:
        raise InputError(str(exc), location=str(path)) from None
