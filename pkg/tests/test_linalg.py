from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circuitwalk.errors import Infeasible
from circuitwalk.linalg import (
    Matrix,
    drop_dependent_rows,
    format_rational,
    kernel_basis,
    parse_rational,
    rank,
    rref,
    solve_linear,
    supp,
    vector,
)

F = Fraction

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def matrices(max_m=3, max_n=5):
    return st.integers(1, max_m).flatmap(
        lambda m: st.integers(1, max_n).flatmap(
            lambda n: st.lists(
                st.lists(rationals, min_size=n, max_size=n), min_size=m, max_size=m
            )
        )
    ).map(Matrix.from_rows)


def test_parse_rational_forms():
    assert parse_rational("3/4") == F(3, 4)
    assert parse_rational("-3/4") == F(-3, 4)
    assert parse_rational("5") == F(5)
    assert parse_rational("-5") == F(-5)


@pytest.mark.parametrize("bad", ["1.5", "3/-4", "", "a", "1/0", " 1/2"])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_format_round_trip():
    for value in (F(3, 4), F(-7, 2), F(5), F(0)):
        assert parse_rational(format_rational(value)) == value


def test_rref_identity():
    M = Matrix.from_rows([[1, 0], [0, 1]])
    reduced, pivots = rref(M)
    assert reduced == M
    assert pivots == (0, 1)


def test_rref_rank_one():
    M = Matrix.from_rows([[1, 2], [2, 4]])
    reduced, pivots = rref(M)
    assert reduced == Matrix.from_rows([[1, 2], [0, 0]])
    assert pivots == (0,)


def test_rref_row_swap():
    # hand elimination: swap the rows, already reduced
    M = Matrix.from_rows([[0, 1, 1], [1, 0, 1]])
    reduced, pivots = rref(M)
    assert reduced == Matrix.from_rows([[1, 0, 1], [0, 1, 1]])
    assert pivots == (0, 1)


def test_rank_examples():
    assert rank(Matrix.from_rows([[0, 0, 0], [0, 0, 0]])) == 0
    assert rank(Matrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == 3
    assert rank(Matrix.from_rows([[1, 1, 0, 0], [0, 0, 1, 1]])) == 2


def test_kernel_identity_empty():
    assert kernel_basis(Matrix.from_rows([[1, 0], [0, 1]])) == []


def test_kernel_rank_one_row():
    M = Matrix.from_rows([[1, 1, 1]])
    basis = kernel_basis(M)
    assert len(basis) == 2
    for v in basis:
        assert M.matvec(v) == (F(0),)
    # independence: the two vectors are not proportional
    a, b = basis
    assert rank(Matrix.from_rows([a, b])) == 2


def test_kernel_single_vector():
    M = Matrix.from_rows([[1, 0, 1], [0, 1, 1]])
    basis = kernel_basis(M)
    assert len(basis) == 1
    v = basis[0]
    assert M.matvec(v) == (F(0), F(0))
    # proportional to (1, 1, -1)
    scale = v[0]
    assert v == (scale, scale, -scale)


def test_solve_identity():
    M = Matrix.from_rows([[1, 0], [0, 1]])
    assert solve_linear(M, vector([3, 5])) == vector([3, 5])


def test_solve_underdetermined_satisfies_system():
    M = Matrix.from_rows([[1, 1]])
    x = solve_linear(M, vector([1]))
    assert M.matvec(x) == vector([1])


def test_solve_inconsistent():
    M = Matrix.from_rows([[1], [1]])
    with pytest.raises(Infeasible):
        solve_linear(M, vector([1, 2]))


def test_drop_dependent_rows_consistent():
    M = Matrix.from_rows([[1, 1], [2, 2]])
    reduced, rhs = drop_dependent_rows(M, vector([1, 2]))
    assert reduced == Matrix.from_rows([[1, 1]])
    assert rhs == vector([1])


def test_drop_dependent_rows_inconsistent():
    M = Matrix.from_rows([[1, 1], [2, 2]])
    with pytest.raises(Infeasible):
        drop_dependent_rows(M, vector([1, 3]))


def test_drop_dependent_rows_full_rank_unchanged():
    M = Matrix.from_rows([[1, 0], [0, 1]])
    reduced, rhs = drop_dependent_rows(M, vector([4, 5]))
    assert reduced == M
    assert rhs == vector([4, 5])


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rref_preserves_row_space(M):
    reduced, pivots = rref(M)
    assert rank(reduced) == len(pivots) == rank(M)
    # every row of the reduced matrix is a combination of the original rows
    # and vice versa: solve against the transposes
    Mt = M.transpose()
    Rt = reduced.transpose()
    for i in range(reduced.m):
        row = reduced.row(i)
        if supp(row):
            solve_linear(Mt, row)  # raises Infeasible if not in the row space
    for i in range(M.m):
        row = M.row(i)
        if supp(row):
            solve_linear(Rt, row)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_kernel_dimension_and_exactness(M):
    basis = kernel_basis(M)
    assert len(basis) == M.n - rank(M)
    zero = (F(0),) * M.m
    for v in basis:
        assert M.matvec(v) == zero
    if basis:
        assert rank(Matrix.from_rows(basis)) == len(basis)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_solve_recovers_solvable_systems(M, data):
    x = tuple(
        data.draw(rationals, label=f"x{j}") for j in range(M.n)
    )
    rhs = M.matvec(x)
    solution = solve_linear(M, rhs)
    assert M.matvec(solution) == rhs


@settings(max_examples=100, deadline=None)
@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == 0
    if a != 0:
        assert a * (1 / a) == 1
