from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitcert import exact
from orbitcert.errors import DimensionError

small = st.integers(min_value=-4, max_value=4)


def qmat(rows):
    return exact.qarray(rows)


@st.composite
def int_matrices(draw, n=3):
    return [[draw(small) for _ in range(n)] for _ in range(n)]


def test_coercions():
    assert exact.Q("3/4") == Fraction(3, 4)
    assert exact.Q(np.int64(5)) == 5
    assert exact.Q(0.5) == Fraction(1, 2)
    assert exact.fmt(Fraction(-2, 6)) == "-1/3"
    assert exact.fmt(Fraction(4)) == "4"
    M = qmat([["1/2", 0], [3, "-7/5"]])
    assert exact.strings_to_matrix(exact.matrix_to_strings(M)).tolist() == M.tolist()


@given(int_matrices(), int_matrices())
@settings(max_examples=40, deadline=None)
def test_sparse_products_match_dense(A, B):
    X, Y = qmat(A), qmat(B)
    assert exact.matmul(X, Y).tolist() == X.dot(Y).tolist()
    assert exact.commutator(X, Y).tolist() == (X.dot(Y) - Y.dot(X)).tolist()


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=5))
@settings(max_examples=60, deadline=None)
def test_rank_and_nullspace_against_numpy(rows):
    M = np.array(rows, dtype=float)
    assert exact.rank(rows) == np.linalg.matrix_rank(M)
    K = exact.nullspace(rows, 4)
    assert len(K) == 4 - np.linalg.matrix_rank(M)
    for v in K:
        assert all(sum(Fraction(a) * b for a, b in zip(r, v)) == 0 for r in rows)


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4), st.lists(small, min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_echelon_coords_reconstruct(gens, target):
    ech = exact.Echelon(gens, track=True)
    c = ech.coords(target)
    in_span = np.linalg.matrix_rank(np.array(gens + [target], float)) == np.linalg.matrix_rank(np.array(gens, float))
    assert (c is not None) == in_span
    if c is not None:
        recon = [sum((c[i] * gens[i][k] for i in range(len(gens))), Fraction(0)) for k in range(3)]
        assert recon == [Fraction(x) for x in target]


def test_echelon_without_tracking_refuses_coords():
    with pytest.raises(RuntimeError):
        exact.Echelon([[1, 0]]).coords([1, 0])


def test_independent_subset_and_solve():
    assert exact.independent_subset([[1, 0], [2, 0], [0, 1]]) == [0, 2]
    assert exact.solve_gram([[2, 1], [1, 1]], [3, 2]) == [1, 1]
    with pytest.raises(ZeroDivisionError):
        exact.solve_gram([[1, 1], [1, 1]], [1, 1])
    with pytest.raises(DimensionError):
        exact.nullspace([[1, 2]], 3)
