"""Moran's index as the quadratic form z'Wz, and the Getis-Ord analog."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import TOL
from .eigen import symmetric_eigenvalues
from .errors import InputError
from .ingest import StandardizedVector
from .weights import WeightMatrix, spatial_lag


@dataclass(frozen=True)
class MoranResult:
    """Moran's index plus the lag quantities the models and bounds reuse.

    ``lag`` is Wz, ``lag_sum`` is (Wz)'o (the with-intercept model's
    intercept) and ``lag_norm2`` is (Wz)'(Wz).
    """

    index: float
    n: int
    lag: np.ndarray
    lag_sum: float
    lag_norm2: float

    @property
    def scaled_lag(self) -> np.ndarray:
        """Ordinate of the normalized scatterplot, n*Wz."""
        return self.n * self.lag


def moran_index(w: WeightMatrix, z: StandardizedVector) -> MoranResult:
    lag = spatial_lag(w, z)
    lag.setflags(write=False)
    return MoranResult(
        index=float(z.z @ lag),
        n=z.n,
        lag=lag,
        lag_sum=float(lag.sum()),
        lag_norm2=float(lag @ lag),
    )


@dataclass(frozen=True)
class OuterProductCheck:
    residual: float  # ||z (z'Wz) - I z||_inf
    trace_residual: float  # |trace(z z' W) - I|
    # eigenvalues of M'M with M = z z'W; rank one means all but the largest vanish
    gram_eigenvalues: np.ndarray | None
    rank_one_residual: float | None
    # for a rank-one matrix the only nonzero eigenvalue equals the trace
    nonzero_eigenvalue: float

    @property
    def max_residual(self) -> float:
        parts = [self.residual, self.trace_residual]
        if self.rank_one_residual is not None:
            parts.append(self.rank_one_residual)
        return max(parts)


def outer_product_check(
    w: WeightMatrix,
    z: StandardizedVector,
    max_eigen_n: int = TOL.outer_product_max_n,
) -> OuterProductCheck:
    """Check that I is the single nonzero eigenvalue of z z'W, with z its eigenvector.

    z z'W = z (Wz)' has rank one, so its spectrum is {trace, 0, ..., 0}.
    Rank one is confirmed through the symmetric Gram matrix
    (z z'W)'(z z'W) = n (Wz)(Wz)', whose eigenvalues must be n-1 zeros
    (only eigensolved when n <= ``max_eigen_n``).
    """
    res = moran_index(w, z)
    zz = z.z
    outer = np.outer(zz, zz) @ w.w
    residual = float(np.abs(outer @ zz - res.index * zz).max())
    trace = float(np.trace(outer))
    trace_residual = abs(trace - res.index)

    gram_eigs = None
    rank_one = None
    if z.n <= max_eigen_n:
        gram = outer.T @ outer
        gram = 0.5 * (gram + gram.T)
        gram_eigs = symmetric_eigenvalues(gram).eigenvalues
        # squared singular values of the n-1 trailing directions
        rank_one = float(np.abs(gram_eigs[:-1]).max()) if z.n > 1 else 0.0
    return OuterProductCheck(
        residual=residual,
        trace_residual=trace_residual,
        gram_eigenvalues=gram_eigs,
        rank_one_residual=rank_one,
        nonzero_eigenvalue=trace,
    )


@dataclass(frozen=True)
class GetisOrdResult:
    index: float
    p: np.ndarray
    zeta: float
    # zeta Wp = G p only holds along p; this is |p'(zeta Wp) - zeta G|
    inner_residual: float
    outer_residual: float  # ||p (p'Wp) - G p||_inf


def getis_ord_index(w: WeightMatrix, x) -> GetisOrdResult:
    """Getis-Ord style index G = p'Wp for the unit vector p = x / ||x||.

    With ||p|| = 1 the two product forms coincide: p'p Wp projected on p
    gives G p, and p p'Wp = G p exactly.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (w.n,):
        raise InputError(f"dimension mismatch: W is {w.n}x{w.n}, vector has shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError("values contain non-finite entries")
    if np.any(x <= 0):
        raise InputError("Getis-Ord index needs strictly positive values")
    norm = float(np.linalg.norm(x))
    p = x / norm
    p.setflags(write=False)
    wp = w.w @ p
    g = float(p @ wp)
    zeta = float(p @ p)
    outer_residual = float(np.abs(np.outer(p, p) @ wp - g * p).max())
    inner_residual = abs(float(p @ (zeta * wp)) - g * zeta)
    return GetisOrdResult(index=g, p=p, zeta=zeta, inner_residual=inner_residual,
                          outer_residual=outer_residual)
