import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moranlab.bounds import compute_bounds, rayleigh_quotient
from moranlab.errors import InputError
from moranlab.ingest import standardize
from moranlab.models import fit_with_intercept, fit_without_intercept
from moranlab.weights import WeightMatrix

from conftest import random_instances
from oracles import bisection_eigenvalues


def test_fixture_a(w3, z_a):
    b = compute_bounds(w3, z_a, fit_with_intercept(w3, z_a))
    root = math.sqrt(2.97)
    assert b.set1[0] == pytest.approx((0.3 - root) / 2, abs=1e-10)
    assert b.set1[1] == pytest.approx((0.3 + root) / 2, abs=1e-10)
    assert b.set3 == pytest.approx((0.0, 0.09), abs=1e-10)
    assert b.set3_quantity == pytest.approx(0.09, abs=1e-10)
    assert b.position()["set3"] == "attains upper bound"
    assert all(b.satisfied.values())
    # -0.3 is an eigenvalue of nW, but not an extreme one
    assert b.position()["set1"] == "strictly inside"


def test_uniform_attains_lower_bound():
    n = 5
    w = WeightMatrix.uniform(n)
    z = standardize([1, 3, 2, 7, 4])
    b = compute_bounds(w, z, fit_with_intercept(w, z))
    assert b.set1[0] == pytest.approx(-1 / (n - 1), abs=1e-12)
    assert b.set1[1] == pytest.approx(1.0, abs=1e-12)
    assert b.position()["set1"] == "attains lower bound"


def test_requires_with_intercept_fit(w3, z_b):
    with pytest.raises(InputError):
        compute_bounds(w3, z_b, fit_without_intercept(w3, z_b))


def test_rayleigh_quotient():
    m = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert rayleigh_quotient(m, [1.0, 1.0]) == pytest.approx(3.0)
    with pytest.raises(InputError):
        rayleigh_quotient(m, [0.0, 0.0])


def test_set1_against_bisection():
    for w, x in random_instances(count=20, n_max=12, seed=5):
        z = standardize(x)
        b = compute_bounds(w, z, fit_with_intercept(w, z))
        lam = bisection_eigenvalues(w.n * w.w)
        assert b.set1 == pytest.approx((lam[0], lam[-1]), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 25), st.integers(0, 2**32 - 1))
def test_containment_and_crosscheck(n, seed):
    w, x = next(random_instances(1, n, n, seed))
    z = standardize(x)
    b = compute_bounds(w, z, fit_with_intercept(w, z))
    assert all(b.satisfied.values())
    assert b.spectral_crosscheck <= 1e-8
    lo, hi = b.intersection_interval_for_I
    assert lo - 1e-9 <= b.index <= hi + 1e-9
    # the error-free quantity understates the observed one by sigma_e^2 >= 0
    assert b.set2_theoretical_quantity <= b.set2_quantity + 1e-15


def test_rayleigh_quotient_of_z_is_index(w3, z_b):
    b = compute_bounds(w3, z_b, fit_with_intercept(w3, z_b))
    assert rayleigh_quotient(3 * w3.w, z_b.z) == pytest.approx(b.index, abs=1e-14)
