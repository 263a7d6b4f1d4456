"""The polyhedron {x : Ax = b, x >= 0}: feasibility, vertices, maximal steps.

Instances are normalized at construction: dependent rows are dropped (or the
instance rejected as inconsistent) so the stored matrix always has full row
rank, and instances with fewer than two independent rows are rejected with a
dedicated error. A small exact primal simplex with Bland's anti-cycling rule
provides feasible points and optimal vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .circuits import ElementaryVector
from .errors import (
    EmptyPolyhedron,
    Infeasible,
    NotAVertex,
    TooFewRows,
    UnboundedDirection,
    UnboundedLP,
    ZeroStep,
)
from .linalg import (
    Matrix,
    Vec,
    ZERO,
    drop_dependent_rows,
    is_zero,
    rank,
    solve_linear,
    supp,
    vec_add,
    vec_scale,
)


@dataclass(frozen=True)
class PolyhedronInstance:
    """Constraint data (A, b) with full row rank m >= 2."""

    A: Matrix
    b: Vec

    def __post_init__(self) -> None:
        if len(self.b) != self.A.m:
            raise ValueError("b length must equal the row count of A")
        if self.A.m < 2:
            raise TooFewRows("instances need at least two independent rows")
        if rank(self.A) != self.A.m:
            raise ValueError("rows of A must be independent; use build()")

    @classmethod
    def build(cls, A: Matrix, b: Vec) -> "PolyhedronInstance":
        """Normalize (A, b): drop dependent rows, reject inconsistency and m < 2."""
        reduced_A, reduced_b = drop_dependent_rows(A, b)
        if reduced_A.m < 2:
            raise TooFewRows(
                f"only {reduced_A.m} independent row(s); at least two required"
            )
        return cls(reduced_A, reduced_b)

    @property
    def m(self) -> int:
        return self.A.m

    @property
    def n(self) -> int:
        return self.A.n


@dataclass(frozen=True)
class VertexWithBasis:
    """A vertex together with a basis B: supp(point) within B, |B| = m."""

    point: Vec
    basis: tuple[int, ...]


@dataclass(frozen=True)
class AugmentationResult:
    """Outcome of one maximal augmentation x -> x + alpha * g."""

    new_point: Vec
    step_length: Fraction
    blocking_index: int


def is_feasible(P: PolyhedronInstance, x: Vec) -> bool:
    if len(x) != P.n:
        raise ValueError("point has the wrong dimension")
    return all(v >= 0 for v in x) and P.A.matvec(x) == P.b


def max_step(P: PolyhedronInstance, x: Vec, g: ElementaryVector) -> AugmentationResult:
    """Maximal feasible augmentation along g from the feasible point x.

    alpha = min over j with g_j < 0 of x_j / (-g_j). Raises UnboundedDirection
    when g has no negative entry and ZeroStep when alpha would be 0; both are
    rejected because a circuit-walk step needs a positive finite maximal step.
    The blocking index is the smallest minimizer.
    """
    direction = g.direction
    alpha: Fraction | None = None
    blocking = -1
    for j in g.support:
        if direction[j] < 0:
            ratio = x[j] / (-direction[j])
            if alpha is None or ratio < alpha:
                alpha = ratio
                blocking = j
    if alpha is None:
        raise UnboundedDirection("direction is nonnegative; no blocking coordinate")
    if alpha == 0:
        raise ZeroStep(f"coordinate {blocking} blocks the step at zero length")
    new_point = vec_add(x, vec_scale(alpha, direction))
    return AugmentationResult(new_point=new_point, step_length=alpha, blocking_index=blocking)


def vertex_from_basis(P: PolyhedronInstance, basis) -> VertexWithBasis:
    """Solve A_B x_B = b with x_N = 0; Infeasible on dependence or negativity."""
    cols = tuple(sorted(basis))
    if len(cols) != P.m:
        raise ValueError(f"basis must have exactly {P.m} indices")
    sub = P.A.column_submatrix(cols)
    if rank(sub) != P.m:
        raise Infeasible("basis columns are linearly dependent")
    solution = solve_linear(sub, P.b)
    if any(v < 0 for v in solution):
        raise Infeasible("basic solution has a negative coordinate")
    point = [ZERO] * P.n
    for value, j in zip(solution, cols, strict=True):
        point[j] = value
    return VertexWithBasis(point=tuple(point), basis=cols)


def basis_from_vertex(P: PolyhedronInstance, x: Vec) -> VertexWithBasis:
    """Extend supp(x) to a basis by the smallest-index independent columns."""
    if not is_feasible(P, x):
        raise NotAVertex("point is not feasible")
    chosen = list(supp(x))
    current = rank(P.A.column_submatrix(chosen)) if chosen else 0
    if current != len(chosen):
        raise NotAVertex("support columns are linearly dependent")
    for j in range(P.n):
        if current == P.m:
            break
        if j in chosen:
            continue
        candidate = sorted(chosen + [j])
        if rank(P.A.column_submatrix(candidate)) > current:
            chosen.append(j)
            current += 1
    return VertexWithBasis(point=x, basis=tuple(sorted(chosen)))


# ---------------------------------------------------------------------------
# exact primal simplex (Bland's rule)
# ---------------------------------------------------------------------------


def _pivot(tableau: list[list[Fraction]], row: int, col: int) -> None:
    inv = 1 / tableau[row][col]
    tableau[row] = [inv * v for v in tableau[row]]
    for i, current in enumerate(tableau):
        if i != row and current[col] != 0:
            f = current[col]
            tableau[i] = [a - f * b for a, b in zip(current, tableau[row])]


def _simplex_min(
    A: Matrix, b: Vec, c: Vec, basis: list[int]
) -> tuple[list[int], list[Fraction]]:
    """Minimize c.x from a basic feasible basis; Bland's rule throughout.

    Returns the optimal basis and the basic values (aligned with the basis
    list). Raises UnboundedLP when some improving column has no positive
    tableau entry.
    """
    m, n = A.m, A.n
    # tableau rows: [A_B^{-1} A | A_B^{-1} b], built by eliminating on the
    # basis columns of the augmented system.
    tableau = [list(A.row(i)) + [b[i]] for i in range(m)]
    for r, j in enumerate(basis):
        pivot_row = next(i for i in range(r, m) if tableau[i][j] != 0)
        tableau[r], tableau[pivot_row] = tableau[pivot_row], tableau[r]
        _pivot(tableau, r, j)
    while True:
        in_basis = set(basis)
        entering = -1
        for j in range(n):
            if j in in_basis:
                continue
            reduced = c[j] - sum(
                (c[basis[i]] * tableau[i][j] for i in range(m)), ZERO
            )
            if reduced < 0:
                entering = j
                break
        if entering < 0:
            values = [tableau[i][n] for i in range(m)]
            return basis, values
        leaving_row = -1
        best: Fraction | None = None
        for i in range(m):
            coeff = tableau[i][entering]
            if coeff > 0:
                ratio = tableau[i][n] / coeff
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leaving_row]
                ):
                    best = ratio
                    leaving_row = i
        if leaving_row < 0:
            raise UnboundedLP(f"column {entering} improves without bound")
        _pivot(tableau, leaving_row, entering)
        basis[leaving_row] = entering


def _phase_one(P: PolyhedronInstance) -> list[int]:
    """A feasible basis of P via artificial variables; EmptyPolyhedron if none."""
    m, n = P.m, P.n
    rows = []
    rhs = []
    for i in range(m):
        row = list(P.A.row(i))
        value = P.b[i]
        if value < 0:
            row = [-v for v in row]
            value = -value
        rows.append(row + [Fraction(i == k) for k in range(m)])
        rhs.append(value)
    augmented = Matrix.from_rows(rows)
    cost = tuple([ZERO] * n + [Fraction(1)] * m)
    basis, values = _simplex_min(augmented, tuple(rhs), cost, list(range(n, n + m)))
    if any(values[i] != 0 for i in range(m) if basis[i] >= n):
        raise EmptyPolyhedron("phase-one optimum is positive")
    # Drive leftover zero-valued artificials out of the basis; full row rank
    # guarantees a structural pivot in every row.
    tableau = [list(augmented.row(i)) + [rhs[i]] for i in range(m)]
    for r, j in enumerate(basis):
        pivot_row = next(i for i in range(r, m) if tableau[i][j] != 0)
        tableau[r], tableau[pivot_row] = tableau[pivot_row], tableau[r]
        _pivot(tableau, r, j)
    for i in range(m):
        if basis[i] >= n:
            entering = next(j for j in range(n) if tableau[i][j] != 0 and j not in set(basis))
            _pivot(tableau, i, entering)
            basis[i] = entering
    return basis


def find_feasible_point(P: PolyhedronInstance) -> Vec:
    """A basic feasible point of P, or EmptyPolyhedron."""
    basis = _phase_one(P)
    return vertex_from_basis(P, basis).point


def solve_lp(P: PolyhedronInstance, c: Vec) -> VertexWithBasis:
    """An optimal vertex minimizing c.x over P via exact two-phase simplex."""
    if len(c) != P.n:
        raise ValueError("objective has the wrong dimension")
    basis = _phase_one(P)
    basis, _ = _simplex_min(P.A, P.b, c, basis)
    return vertex_from_basis(P, basis)
