"""Deterministic, seeded generators for test polyhedra.

Three families: hypercubes in pairing form (x_i + x_{d+i} = 1), balanced
complete bipartite transportation systems with the redundant row dropped,
and random rational instances of certified rank that come with a known
feasible vertex. Identical parameters and seed reproduce identical output.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .linalg import Matrix, Vec, ZERO, ONE, rank
from .polyhedron import PolyhedronInstance, VertexWithBasis


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: tuple[int, ...]
    seed: int = 0


def gen_cube(d: int) -> PolyhedronInstance:
    """The d-cube as d pairing rows over 2d variables, b = all ones."""
    if d < 2:
        raise ValueError("d must be at least 2")
    rows = []
    for i in range(d):
        row = [ZERO] * (2 * d)
        row[i] = ONE
        row[d + i] = ONE
        rows.append(row)
    return PolyhedronInstance(Matrix.from_rows(rows), (ONE,) * d)


def cube_vertex(d: int, bits) -> VertexWithBasis:
    """The cube vertex with x_i = 1 where bits[i], else x_{d+i} = 1."""
    bits = tuple(bits)
    if len(bits) != d:
        raise ValueError("need one bit per dimension")
    point = [ZERO] * (2 * d)
    basis = []
    for i, bit in enumerate(bits):
        j = i if bit else d + i
        point[j] = ONE
        basis.append(j)
    return VertexWithBasis(point=tuple(point), basis=tuple(sorted(basis)))


def gen_transportation(p: int, q: int, seed: int) -> PolyhedronInstance:
    """Complete bipartite p x q transportation system, last demand row dropped.

    Seeded positive integer supplies and demands are balanced by topping up
    the short side, so the instance is always feasible; the incidence system
    has rank p + q - 1, which is exactly the retained row count.
    """
    if p < 2 or q < 2:
        raise ValueError("p and q must be at least 2")
    rng = random.Random(seed)
    supplies = [rng.randint(1, 9) for _ in range(p)]
    demands = [rng.randint(1, 9) for _ in range(q)]
    gap = sum(supplies) - sum(demands)
    if gap > 0:
        demands[-1] += gap
    elif gap < 0:
        supplies[-1] -= gap
    rows = []
    rhs = []
    for i in range(p):
        row = [ZERO] * (p * q)
        for j in range(q):
            row[i * q + j] = ONE
        rows.append(row)
        rhs.append(Fraction(supplies[i]))
    for j in range(q - 1):
        row = [ZERO] * (p * q)
        for i in range(p):
            row[i * q + j] = ONE
        rows.append(row)
        rhs.append(Fraction(demands[j]))
    return PolyhedronInstance(Matrix.from_rows(rows), tuple(rhs))


def gen_random_rational(
    m: int, n: int, magnitude: int, seed: int
) -> tuple[PolyhedronInstance, VertexWithBasis]:
    """Random rational instance of exact rank m plus a certified vertex.

    A is resampled until its rank is m; b is chosen as A x0 for a random
    nonnegative x0 supported on a random independent basis, so the instance
    is nonempty by construction and x0 is a vertex (possibly degenerate).
    """
    if not 2 <= m < n:
        raise ValueError("need 2 <= m < n")
    if magnitude < 1:
        raise ValueError("magnitude must be positive")
    rng = random.Random(seed)
    while True:
        A = Matrix.from_rows(
            [
                [
                    Fraction(rng.randint(-magnitude, magnitude), rng.randint(1, magnitude))
                    for _ in range(n)
                ]
                for _ in range(m)
            ]
        )
        if rank(A) == m:
            break
    while True:
        basis = tuple(sorted(rng.sample(range(n), m)))
        if rank(A.column_submatrix(basis)) == m:
            break
    point = [ZERO] * n
    for j in basis:
        if rng.random() < 0.15:
            continue  # keep an occasional degenerate vertex in the mix
        point[j] = Fraction(rng.randint(1, magnitude), rng.randint(1, magnitude))
    x0: Vec = tuple(point)
    instance = PolyhedronInstance(A, A.matvec(x0))
    return instance, VertexWithBasis(point=x0, basis=basis)


def build_from_spec(spec: GeneratorSpec):
    """Dispatch a GeneratorSpec to its family generator."""
    if spec.family == "cube":
        (d,) = spec.params
        return gen_cube(d)
    if spec.family == "transportation":
        p, q = spec.params
        return gen_transportation(p, q, spec.seed)
    if spec.family == "random":
        m, n, magnitude = spec.params
        return gen_random_rational(m, n, magnitude, spec.seed)
    raise ValueError(f"unknown family {spec.family!r}")
