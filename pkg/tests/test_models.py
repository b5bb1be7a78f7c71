import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moranlab.errors import InputError, NumericalError
from moranlab.ingest import standardize
from moranlab.models import (
    ROUTES,
    coefficient_p_values,
    coefficient_tests_from_moments,
    compare_routes,
    fit_report,
    fit_with_intercept,
    fit_without_intercept,
    intercept_from_identity,
    lag_sum_squared_from_identity,
    r_squared,
    residual_diagnostics,
    t_two_sided_pvalue,
)
from moranlab.moran import moran_index
from moranlab.weights import WeightMatrix

from conftest import SQRT14, random_instances
from oracles import ols_lstsq, t_pvalue_quadrature


@pytest.mark.parametrize("route", ROUTES)
def test_fixture_a_every_route(w3, z_a, route):
    f = fit_with_intercept(w3, z_a, route)
    assert f.slope == pytest.approx(-0.3, abs=1e-10)
    assert f.intercept == pytest.approx(0.0, abs=1e-10)
    assert f.sigma_e2 == pytest.approx(0.0, abs=1e-10)
    assert f.gamma == pytest.approx(0.0, abs=1e-10)


def test_cramer_degenerate_case_is_noted(w3, z_a):
    assert fit_with_intercept(w3, z_a, "cramer").notes


@pytest.mark.parametrize("route", ROUTES)
def test_fixture_b_every_route(w3, z_b, route):
    f = fit_with_intercept(w3, z_b, route)
    assert f.slope == pytest.approx(-11 / 35, abs=1e-10)
    assert f.intercept == pytest.approx(-0.1 / SQRT14, abs=1e-10)
    m = moran_index(w3, z_b)
    assert 3 * m.lag_norm2 == pytest.approx(0.105, abs=1e-12)
    # n|Wz|^2 - I^2 - sigma^2 = a^2
    assert lag_sum_squared_from_identity(3, m.lag_norm2, f.slope, f.sigma_e2) == pytest.approx(
        0.01 / 14, abs=1e-10)
    assert f.sigma_e2 == pytest.approx(0.105 - (11 / 35) ** 2 - 0.01 / 14, abs=1e-12)


def test_fixture_b_r_squared(w3, z_b):
    f = fit_with_intercept(w3, z_b)
    y = moran_index(w3, z_b).scaled_lag
    e = y - f.intercept - f.slope * z_b.z
    expected = 1 - (e @ e) / ((y - y.mean()) @ (y - y.mean()))
    assert f.r_squared == pytest.approx(expected, abs=1e-12)
    assert f.r_squared == pytest.approx(0.94716, abs=1e-5)


def test_against_lstsq_on_random_instances():
    for w, x in random_instances(count=80, seed=11):
        z = standardize(x)
        y = moran_index(w, z).scaled_lag
        a, b = ols_lstsq(y, z.z)
        (b0,) = ols_lstsq(y, z.z, intercept=False)
        for route in ROUTES:
            f = fit_with_intercept(w, z, route)
            assert abs(f.intercept - a) <= 1e-9 and abs(f.slope - b) <= 1e-9
        assert abs(fit_without_intercept(w, z).slope - b0) <= 1e-10


def test_perfect_autocorrelation():
    q = 0.25
    w = WeightMatrix(np.array([[0, q, 0, 0], [q, 0, 0, 0], [0, 0, 0, q], [0, 0, q, 0]]))
    z = standardize([1, 1, -1, -1])
    for route in ROUTES:
        f = fit_with_intercept(w, z, route)
        assert f.slope == pytest.approx(1.0, abs=1e-12)
        assert f.intercept == pytest.approx(0.0, abs=1e-12)
        assert f.sigma_e2 == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(st.integers(3, 30), st.integers(0, 2**32 - 1))
def test_identities_hold(n, seed):
    w, x = next(random_instances(1, n, n, seed))
    z = standardize(x)
    cmp = compare_routes(w, z)
    zero = fit_without_intercept(w, z)
    assert cmp.max_param_spread <= 1e-9
    for f in cmp.fits:
        d = residual_diagnostics(f, w, z)
        assert max(d.eq9_z, d.eq9_o, d.eq23, d.eq24, d.b2) <= 1e-9
        assert abs(f.slope - zero.slope) <= 1e-10
    dz = residual_diagnostics(zero, w, z)
    assert dz.eq9_z <= 1e-9 and dz.eq9_o is None


def test_intercept_recovered_from_identity(w3, z_b):
    m = moran_index(w3, z_b)
    f = fit_with_intercept(w3, z_b)
    a = intercept_from_identity(3, m.lag_norm2, m.index, f.sigma_e2, m.lag_sum)
    assert a == pytest.approx(f.intercept, abs=1e-10)


def test_plug_in_arithmetic_of_worked_example():
    # n = 35, (Wz)'Wz = 0.0025, I = 0.1248, sigma_e^2 = 0.0521, (Wz)'o = -0.1427
    a = intercept_from_identity(35, 0.0025, 0.1248, 0.0521, -0.1427)
    a2 = lag_sum_squared_from_identity(35, 0.0025, 0.1248, 0.0521)
    assert a == pytest.approx(-0.1427, abs=5e-3)
    assert a2 == pytest.approx(0.0204, abs=5e-3)


def _summary_stats(n, a, b, r2):
    """Rebuild sums of squares for y = a + b z + e with sum(z) = 0 and z'z = n."""
    explained = n * b * b
    sse = explained * (1 - r2) / r2
    return sse, sse + explained + n * a * a


# measure, year: n, a, I, R2 (with intercept), R2 and p of the slope without intercept,
# p of intercept and slope with intercept
CITY_SUMMARIES = {
    "pop_2000": (35, -0.0839, -0.0347, 0.0433, 0.0345, 0.2778, 0.0057, 0.2303),
    "pop_2010": (35, -0.0916, -0.0260, 0.0223, 0.0175, 0.4421, 0.0043, 0.3914),
    "ntl_2000": (35, -0.1255, 0.0837, 0.1311, 0.1013, 0.0586, 0.0020, 0.0325),
    "ntl_2010": (35, -0.1427, 0.1248, 0.2301, 0.1769, 0.0106, 0.0011, 0.0035),
}


@pytest.mark.parametrize("key", sorted(CITY_SUMMARIES))
def test_city_summary_r2_conventions(key):
    n, a, b, r2, r2_zero, *_ = CITY_SUMMARIES[key]
    sse, syy = _summary_stats(n, a, b, r2)
    sse_zero = sse + n * a * a  # e* = e + a with z'e = o'e = 0
    assert 1 - sse_zero / syy == pytest.approx(r2_zero, abs=1e-3)


@pytest.mark.parametrize("key", sorted(CITY_SUMMARIES))
def test_city_summary_p_values(key):
    n, a, b, r2, _, p_zero, p_a, p_b = CITY_SUMMARIES[key]
    sse, _ = _summary_stats(n, a, b, r2)
    _, _, _, p = coefficient_tests_from_moments(n, sse, [[n, 0], [0, n]], [a, b])
    assert p[0] == pytest.approx(p_a, abs=1e-3)
    assert p[1] == pytest.approx(p_b, abs=2e-3)
    _, _, _, (pz,) = coefficient_tests_from_moments(n, sse + n * a * a, [[n]], [b])
    assert pz == pytest.approx(p_zero, abs=2e-3)


@pytest.mark.parametrize("df", [1, 2, 5, 33, 34, 200])
@pytest.mark.parametrize("t", [0.0, 0.3, 1.0, 2.5, 6.0, -3.2])
def test_t_pvalue_against_quadrature(t, df):
    assert t_two_sided_pvalue(t, df) == pytest.approx(t_pvalue_quadrature(t, df), abs=1e-10)


def test_t_pvalue_edges():
    assert t_two_sided_pvalue(math.inf, 5) == 0.0
    assert t_two_sided_pvalue(math.nan, 5) == 1.0
    with pytest.raises(InputError):
        t_two_sided_pvalue(1.0, 0)


def test_p_values_against_explicit_ols(w3, z_b):
    f = fit_with_intercept(w3, z_b)
    y = moran_index(w3, z_b).scaled_lag
    tests = coefficient_p_values(f, y)
    x = np.column_stack([np.ones(3), z_b.z])
    s2 = (f.residuals @ f.residuals) / 1
    se = np.sqrt(np.diag(s2 * np.linalg.inv(x.T @ x)))
    assert tests.se_slope == pytest.approx(se[1], rel=1e-10)
    assert tests.p_slope == pytest.approx(t_pvalue_quadrature(f.slope / se[1], 1), abs=1e-9)


def test_zero_intercept_r_squared_is_uncentered(w3, z_b):
    f = fit_without_intercept(w3, z_b)
    y = moran_index(w3, z_b).scaled_lag
    assert r_squared(f, y) == pytest.approx(1 - (f.residuals @ f.residuals) / (y @ y), abs=1e-12)
    assert f.r2_convention != fit_with_intercept(w3, z_b).r2_convention


def test_constant_y_r_squared_raises(w3, z_a):
    f = fit_with_intercept(w3, z_a)
    with pytest.raises(NumericalError):
        r_squared(f, np.full(3, 2.0) + f.residuals)


def test_unknown_route(w3, z_a):
    with pytest.raises(InputError):
        fit_with_intercept(w3, z_a, "magic")


def test_fit_report_keys(w3, z_b):
    rep = fit_report(fit_with_intercept(w3, z_b), w3, z_b)
    for key in ("n", "model", "route", "a", "b_moran", "gamma", "sigma_e2", "r2",
                "p_intercept", "p_slope"):
        assert key in rep
    assert set(rep["identity_residuals"]) == {"eq9_z", "eq9_o", "eq23", "eq24"}
    assert rep["model"] == "with_intercept"
    zero = fit_report(fit_without_intercept(w3, z_b), w3, z_b)
    assert zero["model"] == "zero_intercept" and zero["p_intercept"] is None
