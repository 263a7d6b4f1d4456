"""Exact-arithmetic circuit walks on polyhedra in standard equality form."""

from .circuits import (
    ConformalDecomposition,
    ElementaryVector,
    caratheodory_reduce,
    certify_elementary,
    circuit_imbalance,
    conformal_decompose,
    enumerate_circuits,
    extract_elementary,
)
from .linalg import (
    Matrix,
    Vec,
    drop_dependent_rows,
    format_rational,
    kernel_basis,
    parse_rational,
    rank,
    rref,
    solve_linear,
    supp,
)
from .oracle import OracleWalk, shortest_walk, successors
from .polyhedron import (
    AugmentationResult,
    PolyhedronInstance,
    VertexWithBasis,
    basis_from_vertex,
    find_feasible_point,
    is_feasible,
    max_step,
    solve_lp,
    vertex_from_basis,
)
from .verify import (
    Certificate,
    CheckResult,
    sample_dual_objectives,
    verify_monotone,
    verify_step,
    verify_trace,
)
from .walk import (
    ANY_FEASIBLE_START,
    VERTEX_TO_VERTEX_RESTRICTED,
    AlgorithmConstants,
    WalkStep,
    WalkTrace,
    restrict_columns,
    run_walk,
    solve_and_walk,
    walk_length_budget,
)

__version__ = "0.1.0"
