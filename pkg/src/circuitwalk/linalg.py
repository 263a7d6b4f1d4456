"""Exact rational vectors and matrices, with row reduction and kernel bases.

Everything is built on `fractions.Fraction`, so all comparisons downstream
(argmax of ratios, support minimality, maximal step lengths, termination
tests) are exact. Vectors are plain tuples of Fractions; matrices are a thin
immutable wrapper around a dense row-major grid.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import Infeasible

Vec = tuple[Fraction, ...]

_RATIONAL_RE = re.compile(r"^-?\d+(?:/[1-9]\d*)?$")

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(text: str) -> Fraction:
    """Parse a "p/q" or "p" literal (decimal integers, optional leading minus)."""
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    """Render a Fraction as "p/q", or "p" when the denominator is 1."""
    return str(value)


def vector(values: Iterable) -> Vec:
    return tuple(Fraction(v) for v in values)


def zero_vector(n: int) -> Vec:
    return (ZERO,) * n


def vec_add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_scale(c: Fraction, v: Vec) -> Vec:
    return tuple(c * a for a in v)


def vec_dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), ZERO)


def supp(v: Vec) -> tuple[int, ...]:
    """Indices of the nonzero entries, ascending."""
    return tuple(i for i, a in enumerate(v) if a != 0)


def is_zero(v: Vec) -> bool:
    return all(a == 0 for a in v)


@dataclass(frozen=True)
class Matrix:
    """Dense row-major matrix of Fractions. Immutable and hashable."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if not self.entries or not self.entries[0]:
            raise ValueError("matrix must have at least one row and one column")
        width = len(self.entries[0])
        if any(len(row) != width for row in self.entries):
            raise ValueError("ragged rows")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Matrix":
        return cls(tuple(tuple(Fraction(v) for v in row) for row in rows))

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries[0])

    def row(self, i: int) -> Vec:
        return self.entries[i]

    def col(self, j: int) -> Vec:
        return tuple(row[j] for row in self.entries)

    def column_submatrix(self, cols: Sequence[int]) -> "Matrix":
        return Matrix(tuple(tuple(row[j] for j in cols) for row in self.entries))

    def row_submatrix(self, rows: Sequence[int]) -> "Matrix":
        return Matrix(tuple(self.entries[i] for i in rows))

    def matvec(self, v: Vec) -> Vec:
        return tuple(vec_dot(row, v) for row in self.entries)

    def transpose(self) -> "Matrix":
        return Matrix(tuple(zip(*self.entries)))

    def scale_columns(self, factors: Sequence[Fraction]) -> "Matrix":
        return Matrix(
            tuple(tuple(f * v for f, v in zip(factors, row, strict=True)) for row in self.entries)
        )


def rref(matrix: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and the pivot columns, over the rationals.

    Plain fraction Gaussian elimination; pivots are the first nonzero entry
    in each column scanned left to right, which makes the output canonical.
    """
    rows = [list(row) for row in matrix.entries]
    m, n = matrix.m, matrix.n
    pivots: list[int] = []
    r = 0
    for c in range(n):
        pivot_row = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [inv * v for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return Matrix(tuple(tuple(row) for row in rows)), tuple(pivots)


def rank(matrix: Matrix) -> int:
    return len(rref(matrix)[1])


def kernel_basis(matrix: Matrix) -> list[Vec]:
    """Canonical kernel basis: one vector per free column of the RREF.

    The basis vector for free column f has a 1 at f and the negated RREF
    entries at the pivot columns; vectors are listed by ascending free column.
    """
    reduced, pivots = rref(matrix)
    n = matrix.n
    pivot_set = set(pivots)
    basis: list[Vec] = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = [ZERO] * n
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -reduced.entries[i][f]
        basis.append(tuple(v))
    return basis


def solve_linear(matrix: Matrix, rhs: Vec) -> Vec:
    """One exact solution of ``matrix @ x = rhs``, with free variables at zero.

    Raises Infeasible when the system is inconsistent.
    """
    if len(rhs) != matrix.m:
        raise ValueError("rhs length must equal the number of rows")
    augmented = Matrix(
        tuple(row + (rhs[i],) for i, row in enumerate(matrix.entries))
    )
    reduced, pivots = rref(augmented)
    if pivots and pivots[-1] == matrix.n:
        raise Infeasible("inconsistent linear system")
    x = [ZERO] * matrix.n
    for i, p in enumerate(pivots):
        x[p] = reduced.entries[i][matrix.n]
    return tuple(x)


def drop_dependent_rows(matrix: Matrix, rhs: Vec) -> tuple[Matrix, Vec]:
    """Keep a maximal independent set of rows (first-come), same solution set.

    Raises Infeasible when a dropped row is inconsistent with the kept ones,
    i.e. when the augmented matrix has higher rank than the matrix itself.
    """
    if len(rhs) != matrix.m:
        raise ValueError("rhs length must equal the number of rows")
    augmented = Matrix(
        tuple(row + (rhs[i],) for i, row in enumerate(matrix.entries))
    )
    if rank(augmented) > rank(matrix):
        raise Infeasible("a dependent row is inconsistent with the kept rows")
    kept: list[int] = []
    current_rank = 0
    for i in range(matrix.m):
        candidate = matrix.row_submatrix(kept + [i])
        if rank(candidate) > current_rank:
            kept.append(i)
            current_rank += 1
    return matrix.row_submatrix(kept), tuple(rhs[i] for i in kept)
