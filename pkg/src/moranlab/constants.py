"""Numerical tolerances shared across the package.

Every threshold used for validation or pass/fail reporting lives here so the
CLI can echo the full set into its reports.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Tolerances:
    # standardized vector: |sum z| and |z'z - n| are scaled by n
    standardize: float = 1e-10
    # grand sum of W must be 1 within this
    weight_sum: float = 1e-12
    # symmetry check for W and for eigensolver input
    symmetry: float = 1e-12
    # pass/fail threshold for reported identity checks
    identity: float = 1e-9
    # slack on bound containments
    bounds_slack: float = 1e-9
    # reject the 2x2 normal matrix when det < singular * n**2
    singular: float = 1e-12
    # Cramer route: treat |C| below this (relative) as the a-undetermined case
    cramer_degenerate: float = 1e-6
    # Jacobi: off-diagonal Frobenius mass relative to ||A||_F
    jacobi_offdiag: float = 1e-14
    jacobi_max_sweeps: int = 100
    eigen_max_n: int = 10_000
    # outer-product rank check is eigensolved only up to this n
    outer_product_max_n: int = 12

    def as_dict(self) -> dict:
        return asdict(self)


TOL = Tolerances()

# significant digits for floats written to report.json / scatter.csv
FLOAT_DIGITS = 12
