import math

import numpy as np
import pytest

from moranlab.ingest import DistanceMatrix, standardize
from moranlab.synthetic import euclidean_distances
from moranlab.weights import weights_from_distances

R3 = [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]]
IDS3 = ("A", "B", "C")
X_A = [1.0, 2.0, 3.0]
X_B = [1.0, 2.0, 4.0]
SQRT14 = math.sqrt(14.0)


@pytest.fixture
def w3():
    return weights_from_distances(DistanceMatrix(IDS3, R3))


@pytest.fixture
def z_a():
    return standardize(X_A)


@pytest.fixture
def z_b():
    return standardize(X_B)


def random_instances(count=200, n_min=3, n_max=30, seed=20240611):
    """Seeded (points -> inverse-distance W, positive x) instances."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        pts = rng.random((n, 2))
        ids = tuple(f"u{i}" for i in range(n))
        r = euclidean_distances(pts)
        x = rng.lognormal(mean=2.0, sigma=1.0, size=n)
        yield weights_from_distances(DistanceMatrix(ids, r)), x


def write_fixture(tmp_path, x=X_A, ids=IDS3, r=R3, column="x"):
    values = tmp_path / "values.csv"
    values.write_text(f"id,{column}\n" + "".join(f"{i},{v!r}\n" for i, v in zip(ids, x)))
    dist = tmp_path / "distances.csv"
    dist.write_text("id," + ",".join(ids) + "\n"
                    + "".join(f"{i}," + ",".join(repr(float(v)) for v in row) + "\n"
                              for i, row in zip(ids, r)))
    return values, dist


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
