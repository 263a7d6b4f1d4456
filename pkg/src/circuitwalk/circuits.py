"""Elementary vectors (circuits) of ker(A) and conformal circuit decomposition.

An elementary vector is a support-minimal nonzero kernel vector of the
constraint matrix; its support is a circuit of the column matroid. The key
exact tests used throughout:

* ``g`` is elementary  iff  ``A g = 0``, ``g != 0``, and the columns of A
  indexed by supp(g) have a one-dimensional kernel (whose generator then
  necessarily has full support).
* a conformal decomposition writes a kernel vector ``x`` as a sum of
  elementary vectors that are sign-compatible with ``x`` and componentwise
  no larger; it always exists with at most
  min(dim ker(A restricted to supp(x)), |supp(x)|) terms.

The decomposition here is a deterministic greedy peel-off: reflect ``x`` into
the nonnegative orthant by flipping column signs, shrink the residual to a
nonnegative elementary vector by repeated line searches against extracted
circuits, peel the largest multiple that keeps the residual nonnegative, and
finally run conic Caratheodory reduction to meet the kernel-dimension bound.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import BudgetExceeded, NoCircuit
from .linalg import (
    Matrix,
    Vec,
    ZERO,
    is_zero,
    kernel_basis,
    supp,
    vec_scale,
    vec_sub,
)

DEFAULT_ENUM_BUDGET = 200_000
ENUM_BUDGET_ENV = "CIRCUITWALK_ENUM_BUDGET"


@dataclass(frozen=True)
class ElementaryVector:
    """A support-minimal kernel vector together with its support (a circuit)."""

    direction: Vec
    support: tuple[int, ...]

    @classmethod
    def from_direction(cls, direction: Vec) -> "ElementaryVector":
        return cls(direction=direction, support=supp(direction))

    def negate(self) -> "ElementaryVector":
        return ElementaryVector(vec_scale(Fraction(-1), self.direction), self.support)

    def scale(self, factor: Fraction) -> "ElementaryVector":
        if factor == 0:
            raise ValueError("scaling an elementary vector by zero")
        return ElementaryVector(vec_scale(factor, self.direction), self.support)

    def has_negative_entry(self) -> bool:
        return any(v < 0 for v in self.direction)


def _canonical_scale(direction: Vec) -> Vec:
    """Scale so the first nonzero entry equals +1."""
    lead = next(v for v in direction if v != 0)
    return vec_scale(1 / lead, direction)


def certify_elementary(A: Matrix, g: Vec) -> bool:
    """True iff g is a support-minimal nonzero kernel vector of A."""
    if len(g) != A.n or is_zero(g):
        return False
    if not is_zero(A.matvec(g)):
        return False
    sub = A.column_submatrix(supp(g))
    return len(kernel_basis(sub)) == 1


def _embed(sub_vec: Vec, cols: Sequence[int], n: int) -> Vec:
    full = [ZERO] * n
    for value, j in zip(sub_vec, cols, strict=True):
        full[j] = value
    return tuple(full)


def extract_elementary(A: Matrix, within: Sequence[int]) -> ElementaryVector:
    """A canonical elementary vector supported inside ``within``.

    Raises NoCircuit when the columns indexed by ``within`` are independent.
    Deterministic: starts from the first canonical kernel vector of the
    column submatrix and repeatedly shrinks the support, eliminating the
    largest removable index first, until the restricted kernel is
    one-dimensional. The result is scaled so its first nonzero entry is +1.
    """
    cols = sorted(set(within))
    if any(j < 0 or j >= A.n for j in cols):
        raise ValueError("column index out of range")
    if not cols:
        raise NoCircuit("empty column set")
    basis = kernel_basis(A.column_submatrix(cols))
    if not basis:
        raise NoCircuit("columns are linearly independent")
    cols = [cols[i] for i in supp(basis[0])]
    while True:
        basis = kernel_basis(A.column_submatrix(cols))
        g = basis[0]
        nonzero = supp(g)
        if len(nonzero) < len(cols):
            cols = [cols[i] for i in nonzero]
            continue
        if len(basis) == 1:
            direction = _canonical_scale(_embed(g, cols, A.n))
            return ElementaryVector(direction, tuple(cols))
        # g has full support but the kernel is bigger: cancel the largest
        # index of a second kernel vector to shrink the support strictly.
        w = basis[1]
        j = max(supp(w))
        reduced = vec_sub(g, vec_scale(g[j] / w[j], w))
        cols = [cols[i] for i in supp(reduced)]


def enumerate_circuits(A: Matrix, budget: int | None = None) -> list[ElementaryVector]:
    """All circuits of A, one canonically scaled representative per support.

    Exhausts supports of size at most m+1 (no circuit can be larger), so the
    candidate count is checked against ``budget`` first; the default comes
    from the CIRCUITWALK_ENUM_BUDGET environment variable when set.
    """
    if budget is None:
        budget = int(os.environ.get(ENUM_BUDGET_ENV, DEFAULT_ENUM_BUDGET))
    n = A.n
    max_size = min(A.m + 1, n)
    candidates = sum(math.comb(n, k) for k in range(1, max_size + 1))
    if candidates > budget:
        raise BudgetExceeded(
            f"{candidates} candidate supports exceed the budget of {budget}"
        )
    found: list[ElementaryVector] = []
    for size in range(1, max_size + 1):
        for subset in combinations(range(n), size):
            basis = kernel_basis(A.column_submatrix(subset))
            if len(basis) != 1:
                continue
            generator = basis[0]
            if len(supp(generator)) != size:
                continue
            direction = _canonical_scale(_embed(generator, subset, n))
            found.append(ElementaryVector(direction, subset))
    found.sort(key=lambda ev: ev.support)
    return found


def circuit_imbalance(A: Matrix, budget: int | None = None) -> Fraction:
    """Exact max over circuits g of max |g_i| / |g_j| over the support."""
    circuits = enumerate_circuits(A, budget=budget)
    if not circuits:
        raise NoCircuit("matrix has no circuits")
    worst = Fraction(0)
    for circuit in circuits:
        magnitudes = [abs(circuit.direction[j]) for j in circuit.support]
        ratio = max(magnitudes) / min(magnitudes)
        worst = max(worst, ratio)
    return worst


@dataclass(frozen=True)
class ConformalDecomposition:
    """Scaled elementary vectors that sum to ``target``, each conformal to it."""

    target: Vec
    terms: tuple[ElementaryVector, ...]


def _sorted_terms(terms: Sequence[ElementaryVector]) -> tuple[ElementaryVector, ...]:
    return tuple(sorted(terms, key=lambda t: (t.support, t.direction)))


def _conformal_elementary_from(A_reflected: Matrix, residual: Vec) -> Vec:
    """Shrink a nonnegative kernel vector to a nonnegative elementary one.

    While the support of the candidate carries a kernel of dimension >= 2,
    line-search against an extracted circuit: subtracting the largest multiple
    that keeps the candidate nonnegative zeroes at least one coordinate.
    """
    v = residual
    while True:
        support = supp(v)
        if len(kernel_basis(A_reflected.column_submatrix(support))) == 1:
            return v
        circuit = extract_elementary(A_reflected, support)
        g = circuit.direction
        step = min(v[j] / g[j] for j in circuit.support if g[j] > 0)
        v = vec_sub(v, vec_scale(step, g))


def conformal_decompose(A: Matrix, x: Vec) -> ConformalDecomposition:
    """A conformal circuit decomposition of the kernel vector ``x``.

    Deterministic; the returned terms are Caratheodory-reduced, so the term
    count is at most min(dim ker(A restricted to supp(x)), |supp(x)|).
    """
    if len(x) != A.n:
        raise ValueError("vector length must equal the column count")
    if not is_zero(A.matvec(x)):
        raise ValueError("input is not in the kernel of A")
    if is_zero(x):
        return ConformalDecomposition(target=x, terms=())
    signs = tuple(Fraction(-1) if v < 0 else Fraction(1) for v in x)
    reflected = A.scale_columns(signs)
    residual = tuple(abs(v) for v in x)
    terms: list[ElementaryVector] = []
    while not is_zero(residual):
        v = _conformal_elementary_from(reflected, residual)
        step = min(residual[j] / v[j] for j in supp(v))
        peeled = vec_scale(step, v)
        residual = vec_sub(residual, peeled)
        direction = tuple(s * p for s, p in zip(signs, peeled, strict=True))
        terms.append(ElementaryVector(direction, supp(direction)))
    decomposition = ConformalDecomposition(target=x, terms=_sorted_terms(terms))
    return caratheodory_reduce(A, decomposition)


def caratheodory_reduce(
    A: Matrix, decomposition: ConformalDecomposition
) -> ConformalDecomposition:
    """Drop linearly dependent terms while preserving the sum and conformality.

    Whenever the terms admit a dependency mu with a positive entry, shift the
    (implicit, all-one) coefficients by the largest theta keeping them
    nonnegative; at least one coefficient hits zero and no term flips sign,
    so every survivor stays conformal to the target. Idempotent.
    """
    terms = list(decomposition.terms)
    while len(terms) > 1:
        columns = Matrix(tuple(zip(*(t.direction for t in terms))))
        dependencies = kernel_basis(columns)
        if not dependencies:
            break
        mu = dependencies[0]
        if all(c <= 0 for c in mu):
            mu = vec_scale(Fraction(-1), mu)
        theta = min(1 / c for c in mu if c > 0)
        survivors: list[ElementaryVector] = []
        for term, c in zip(terms, mu, strict=True):
            coefficient = 1 - theta * c
            if coefficient != 0:
                survivors.append(term.scale(coefficient))
        terms = survivors
    return ConformalDecomposition(
        target=decomposition.target, terms=_sorted_terms(terms)
    )
