"""Cyclic Jacobi eigensolver for real symmetric matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import TOL
from .errors import InputError, NumericalError


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    max_offdiag_residual: float
    sweeps: int
    eigenvectors: np.ndarray | None = None

    def reconstruct(self) -> np.ndarray:
        if self.eigenvectors is None:
            raise ValueError("eigenvectors were not requested")
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def _offdiag_norm(a: np.ndarray) -> float:
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return float(np.sqrt(off @ off))


def symmetric_eigenvalues(
    m,
    vectors: bool = False,
    tol: float = TOL.jacobi_offdiag,
    max_sweeps: int = TOL.jacobi_max_sweeps,
) -> EigenDecomposition:
    """Eigenvalues (ascending) of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius mass falls to
    ``tol * ||m||_F`` or a full sweep finds nothing left to rotate.

    Parameters
    ----------
    m : (n, n) array_like
        Symmetric within ``TOL.symmetry`` (relative to its largest entry).
    vectors : bool
        Also accumulate the orthogonal eigenvector matrix, columns matching
        the sorted eigenvalues.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"matrix is not square: shape {a.shape}")
    n = a.shape[0]
    if n > TOL.eigen_max_n:
        raise InputError(f"matrix too large for the Jacobi solver (n={n} > {TOL.eigen_max_n})")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    scale = float(np.abs(a).max()) if n else 0.0
    if n and np.abs(a - a.T).max() > TOL.symmetry * max(scale, 1.0):
        raise InputError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n) if vectors else None

    fro = float(np.linalg.norm(a))
    threshold = tol * fro
    sweeps = 0
    while True:
        off = _offdiag_norm(a)
        if off <= threshold:
            break
        if sweeps >= max_sweeps:
            raise NumericalError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e})"
            )
        sweeps += 1
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                g = 100.0 * abs(apq)
                # element below the precision of both diagonal entries
                if sweeps > 4 and abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0

                if v is not None:
                    vp = v[:, p].copy()
                    vq = v[:, q]
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
                rotated = True
        if not rotated:
            break

    lam = np.diag(a).copy()
    order = np.argsort(lam, kind="stable")
    offmax = float(np.abs(a - np.diag(np.diag(a))).max()) if n else 0.0
    return EigenDecomposition(
        eigenvalues=lam[order],
        max_offdiag_residual=offmax,
        sweeps=sweeps,
        eigenvectors=v[:, order] if v is not None else None,
    )
