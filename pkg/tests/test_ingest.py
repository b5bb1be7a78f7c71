import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moranlab.errors import InputError
from moranlab.ingest import (
    AttributeTable,
    DistanceMatrix,
    load_attribute_table,
    load_distance_matrix,
    standardize,
    write_attribute_table,
    write_distance_matrix,
)

from oracles import standardize_naive


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_bytes(text.encode("utf-8"))
    return p


def test_load_simple_table(tmp_path):
    t = load_attribute_table(write(tmp_path, "v.csv", "id,x\nA,1\nB,2\nC,3\n"))
    assert t.ids == ("A", "B", "C")
    np.testing.assert_array_equal(t.column("x"), [1.0, 2.0, 3.0])


def test_crlf_and_bom(tmp_path):
    t = load_attribute_table(write(tmp_path, "v.csv", "﻿id,x,y\r\nA,1,2\r\nB,3,4\r\n"))
    assert t.ids == ("A", "B")
    np.testing.assert_array_equal(t.column("y"), [2.0, 4.0])


def test_non_numeric_cell_reports_location(tmp_path):
    with pytest.raises(InputError, match=r"row 2, column x.*abc|abc") as exc:
        load_attribute_table(write(tmp_path, "v.csv", "id,x\nA,abc\nB,2\nC,3\n"))
    assert "row 2" in str(exc.value) and "column x" in str(exc.value)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("id,x\nA,1\nA,2\n", "duplicate id"),
        ("id,x\nA,1\nB\n", "ragged"),
        ("id,x\nA,1\nB,\n", "missing value"),
        ("id,x\nA,1\nB,nan\n", "non-finite"),
    ],
)
def test_table_errors(tmp_path, text, fragment):
    with pytest.raises(InputError, match=fragment):
        load_attribute_table(write(tmp_path, "v.csv", text))


def test_missing_file(tmp_path):
    with pytest.raises(InputError, match="not found"):
        load_attribute_table(tmp_path / "nope.csv")


def test_load_distance_matrix_valid(tmp_path):
    d = load_distance_matrix(write(tmp_path, "d.csv", "id,A,B,C\nA,0,1,2\nB,1,0,1\nC,2,1,0\n"))
    assert d.ids == ("A", "B", "C")
    np.testing.assert_array_equal(d.r, [[0, 1, 2], [1, 0, 1], [2, 1, 0]])


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("id,A,B,C\nA,0,1,2\nB,1,0,1.5\nC,2,1,0\n", "asymmetric"),
        ("id,A,B,C\nA,0,1,2\nB,1,0.1,1\nC,2,1,0\n", "diagonal"),
        ("id,A,B,C\nA,0,1,2\nB,1,0,1\n", "non-square"),
        ("id,A,B\nA,0,1,2\nB,1,0,1\n", "non-square"),
        ("id,A,B,C\nA,0,0,2\nB,0,0,1\nC,2,1,0\n", "non-positive"),
        ("id,A,B,C\nA,0,-1,2\nB,-1,0,1\nC,2,1,0\n", "non-positive"),
    ],
)
def test_distance_errors(tmp_path, text, fragment):
    with pytest.raises(InputError, match=fragment):
        load_distance_matrix(write(tmp_path, "d.csv", text))


def test_standardize_hand_oracle():
    z = standardize([1, 2, 3])
    np.testing.assert_allclose(z.z, [-math.sqrt(1.5), 0.0, math.sqrt(1.5)], atol=1e-15)
    assert z.n == 3 and not z.log_applied


def test_standardize_log_reduces_to_linear_case():
    z = standardize([math.e, math.e ** 2, math.e ** 3], log_transform=True)
    np.testing.assert_allclose(z.z, [-math.sqrt(1.5), 0.0, math.sqrt(1.5)], atol=1e-12)
    assert z.log_applied


@pytest.mark.parametrize(
    "values, log, fragment",
    [
        ([5, 5, 5], False, "constant"),
        ([1, 2], False, "at least 3"),
        ([1, 0, 2], True, "positive"),
        ([1, -2, 2], True, "positive"),
        ([1, float("nan"), 2], False, "non-finite"),
    ],
)
def test_standardize_errors(values, log, fragment):
    with pytest.raises(InputError, match=fragment):
        standardize(values, log_transform=log)


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(finite, min_size=3, max_size=60).filter(lambda v: max(v) - min(v) > 1e-3))
def test_standardized_invariants(values):
    z = standardize(values)
    n = len(values)
    assert abs(z.z.sum()) <= 1e-10 * n
    assert abs(z.z @ z.z - n) <= 1e-10 * n
    np.testing.assert_allclose(z.z, standardize_naive(values), atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(min_value=-100, max_value=100), min_size=3, max_size=40)
    .filter(lambda v: max(v) - min(v) > 1e-2),
    st.floats(min_value=1e-3, max_value=1e3),
    st.floats(min_value=-1e3, max_value=1e3),
)
def test_standardize_affine_equivariance(values, alpha, beta):
    x = np.array(values)
    np.testing.assert_allclose(standardize(alpha * x + beta).z, standardize(x).z, atol=1e-10)


def test_table_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    ids = tuple(f"city{i}" for i in range(35))
    t = AttributeTable(ids, {"pop": rng.lognormal(5, 1, 35), "ntl": rng.random(35) * 60})
    path = tmp_path / "t.csv"
    write_attribute_table(t, path)
    back = load_attribute_table(path)
    assert back.ids == t.ids and back.n == 35
    for name in t.columns:
        np.testing.assert_array_equal(back.column(name), t.column(name))


def test_distance_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    pts = rng.random((12, 2))
    r = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
    r = np.triu(r, 1)
    d = DistanceMatrix(tuple("abcdefghijkl"), r + r.T)
    path = tmp_path / "d.csv"
    write_distance_matrix(d, path)
    back = load_distance_matrix(path)
    assert back.ids == d.ids
    np.testing.assert_array_equal(back.r, d.r)


def test_missing_column_names_it():
    t = AttributeTable(("a", "b", "c"), {"x": [1, 2, 3]})
    with pytest.raises(InputError, match="'pop'"):
        t.column("pop")
