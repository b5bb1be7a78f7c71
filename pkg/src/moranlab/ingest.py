"""CSV ingestion of attribute tables and distance matrices, and z-scoring.

Attribute CSV::

    id,pop,ntl
    Beijing,1961.2,53.1
    ...

Distance CSV (square, same ids in header and first column)::

    id,A,B,C
    A,0,1,2
    B,1,0,1
    C,2,1,0

Row numbers in error messages are file line numbers, so the header is row 1
and the first data row is row 2.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .constants import TOL
from .errors import InputError


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AttributeTable:
    ids: tuple[str, ...]
    columns: Mapping[str, np.ndarray]

    def __post_init__(self):
        if len(set(self.ids)) != len(self.ids):
            raise InputError("duplicate unit ids")
        cols = {}
        for name, values in self.columns.items():
            arr = _frozen(values)
            if arr.shape != (len(self.ids),):
                raise InputError(
                    f"column {name!r} has {arr.size} values for {len(self.ids)} ids"
                )
            if not np.all(np.isfinite(arr)):
                raise InputError(f"column {name!r} has missing or non-finite values")
            cols[name] = arr
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "columns", cols)

    @property
    def n(self) -> int:
        return len(self.ids)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            available = ", ".join(self.columns) or "none"
            raise InputError(
                f"column {name!r} not found (available: {available})"
            ) from None


@dataclass(frozen=True)
class DistanceMatrix:
    ids: tuple[str, ...]
    r: np.ndarray

    def __post_init__(self):
        r = _frozen(self.r)
        n = len(self.ids)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise InputError(f"distance matrix is not square: shape {r.shape}")
        if r.shape[0] != n:
            raise InputError(f"distance matrix is {r.shape[0]}x{r.shape[0]} for {n} ids")
        if len(set(self.ids)) != n:
            raise InputError("duplicate unit ids")
        if not np.all(np.isfinite(r)):
            raise InputError("distance matrix has missing or non-finite entries")
        diag = np.diag(r)
        bad = np.flatnonzero(diag != 0.0)
        if bad.size:
            i = bad[0]
            raise InputError(f"nonzero diagonal r[{i}][{i}] = {diag[i]!r} ({self.ids[i]})")
        asym = np.argwhere(r != r.T)
        if asym.size:
            i, j = asym[0]
            raise InputError(
                f"asymmetric distances: r[{i}][{j}] = {r[i, j]!r} but r[{j}][{i}] = {r[j, i]!r}"
            )
        off = ~np.eye(n, dtype=bool)
        nonpos = np.argwhere(off & (r <= 0.0))
        if nonpos.size:
            i, j = nonpos[0]
            raise InputError(
                f"non-positive distance r[{i}][{j}] = {r[i, j]!r} between distinct units "
                f"{self.ids[i]} and {self.ids[j]}"
            )
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "r", r)

    @property
    def n(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class StandardizedVector:
    """z-scored attribute: mean 0 and population standard deviation 1."""

    z: np.ndarray
    source_column: str = ""
    log_applied: bool = False
    n: int = field(init=False)

    def __post_init__(self):
        z = _frozen(self.z)
        if z.ndim != 1:
            raise InputError("standardized vector must be one-dimensional")
        n = z.size
        tol = TOL.standardize * n
        if abs(z.sum()) > tol or abs(z @ z - n) > tol:
            raise InputError(
                f"vector is not standardized: sum={z.sum():.3e}, z'z-n={z @ z - n:.3e}"
            )
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "n", n)

    def __len__(self) -> int:
        return self.n


def standardize(values, log_transform: bool = False, source_column: str = "") -> StandardizedVector:
    """Return ``(y - mean(y)) / sd_pop(y)`` with ``y = ln(x)`` if requested."""
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise InputError("values must be a one-dimensional vector")
    if x.size < 3:
        raise InputError(f"need at least 3 values, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise InputError("values contain missing or non-finite entries")
    if log_transform:
        bad = np.flatnonzero(x <= 0)
        if bad.size:
            raise InputError(
                f"log transform needs strictly positive values; value[{bad[0]}] = {x[bad[0]]!r}"
            )
        y = np.log(x)
    else:
        y = x
    d = y - y.mean()
    sd = math.sqrt(float(d @ d) / y.size)
    if sd == 0.0 or sd < 1e-300:
        raise InputError("constant input: population standard deviation is zero")
    z = d / sd
    # one re-centering pass removes the O(eps) drift of the first mean
    z = z - z.mean()
    z = z * math.sqrt(z.size / float(z @ z))
    return StandardizedVector(z, source_column=source_column, log_applied=log_transform)


# ---------------------------------------------------------------------------
# CSV loading


def _read_rows(path: str | Path, delimiter: str) -> list[list[str]]:
    p = Path(path)
    if not p.is_file():
        raise InputError("file not found", location=str(p))
    with p.open(newline="", encoding="utf-8-sig") as fh:
        rows = [row for row in csv.reader(fh, delimiter=delimiter)]
    # trailing blank lines are tolerated, interior ones are not
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise InputError("empty file", location=str(p))
    return rows


def _parse_float(cell: str, where: str) -> float:
    text = cell.strip()
    if not text:
        raise InputError("missing value", location=where)
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"non-numeric value {text!r}", location=where) from None
    if not math.isfinite(value):
        raise InputError(f"non-finite value {text!r}", location=where)
    return value


def load_attribute_table(path: str | Path, delimiter: str = ",") -> AttributeTable:
    rows = _read_rows(path, delimiter)
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise InputError("header needs an id column and at least one value column",
                         location=f"{path}: row 1")
    names = header[1:]
    if len(set(names)) != len(names):
        raise InputError("duplicate column names", location=f"{path}: row 1")
    ids: list[str] = []
    seen: dict[str, int] = {}
    data: list[list[float]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"ragged row: {len(row)} cells, header has {len(header)}",
                             location=f"{path}: row {lineno}")
        uid = row[0].strip()
        if not uid:
            raise InputError("empty id", location=f"{path}: row {lineno}, column {header[0]}")
        if uid in seen:
            raise InputError(f"duplicate id {uid!r} (first seen at row {seen[uid]})",
                             location=f"{path}: row {lineno}")
        seen[uid] = lineno
        ids.append(uid)
        data.append([
            _parse_float(cell, f"{path}: row {lineno}, column {name}")
            for cell, name in zip(row[1:], names)
        ])
    if not ids:
        raise InputError("no data rows", location=str(path))
    arr = np.array(data, dtype=float)
    return AttributeTable(tuple(ids), {name: arr[:, k] for k, name in enumerate(names)})


def load_square_csv(path: str | Path, delimiter: str = ",") -> tuple[tuple[str, ...], np.ndarray]:
    """Read a labelled square matrix; header ids must match row ids in order."""
    rows = _read_rows(path, delimiter)
    header = [h.strip() for h in rows[0]]
    col_ids = header[1:]
    body = rows[1:]
    n = len(col_ids)
    if len(body) != n:
        raise InputError(f"non-square matrix: {n} columns but {len(body)} rows", location=str(path))
    ids: list[str] = []
    values = np.empty((n, n))
    for k, row in enumerate(body):
        lineno = k + 2
        if len(row) != n + 1:
            raise InputError(f"non-square matrix: row has {len(row) - 1} values, expected {n}",
                             location=f"{path}: row {lineno}")
        uid = row[0].strip()
        if uid != col_ids[k]:
            raise InputError(f"row id {uid!r} does not match header id {col_ids[k]!r}",
                             location=f"{path}: row {lineno}")
        ids.append(uid)
        for j, cell in enumerate(row[1:]):
            values[k, j] = _parse_float(cell, f"{path}: row {lineno}, column {col_ids[j]}")
    return tuple(ids), values


def load_distance_matrix(path: str | Path, delimiter: str = ",") -> DistanceMatrix:
    ids, r = load_square_csv(path, delimiter)
    try:
        return DistanceMatrix(ids, r)
    except InputError as exc:
        raise InputError(str(exc), location=str(path)) from None


def check_alignment(table_ids: Sequence[str], matrix_ids: Sequence[str]) -> None:
    if tuple(table_ids) != tuple(matrix_ids):
        missing = sorted(set(table_ids) ^ set(matrix_ids))
        detail = f"ids differ: {missing[:5]}" if missing else "same ids in a different order"
        raise InputError(f"attribute table and matrix are not aligned ({detail})")


# ---------------------------------------------------------------------------
# CSV writing (exact round trip via repr)


def write_attribute_table(table: AttributeTable, path: str | Path) -> None:
    names = list(table.columns)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", *names])
        for i, uid in enumerate(table.ids):
            w.writerow([uid, *(repr(float(table.columns[c][i])) for c in names)])


def write_square_csv(ids: Iterable[str], m: np.ndarray, path: str | Path, fmt=repr) -> None:
    ids = list(ids)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", *ids])
        for uid, row in zip(ids, np.asarray(m, dtype=float)):
            w.writerow([uid, *(fmt(float(v)) for v in row)])


def write_distance_matrix(d: DistanceMatrix, path: str | Path) -> None:
    write_square_csv(d.ids, d.r, path)
