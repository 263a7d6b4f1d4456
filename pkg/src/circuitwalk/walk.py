"""Two-phase construction of circuit walks toward a target vertex.

Given a feasible start and a target vertex x* with basis B (nonbasic set N),
the walk proceeds in two phases:

* support reduction: while more than m nonbasic coordinates are nonzero,
  augment maximally along a circuit supported inside supp(x_N); each step
  zeroes at least one nonbasic coordinate.

* main loop: maintain the trapped set T = {t in B : x_t <= m x*_t}, which
  never loses a member, and a reference iterate x^(r). While some nonbasic
  ratio x_j / x^(r)_j exceeds tau, take a norm-reduction step: conformally
  decompose x* - x, pick the term with the best weighted l1 progress on N,
  and augment maximally; each such step contracts the weighted l1 norm by a
  (1 - 1/m) factor with step length in [1, m]. Once all ratios drop to tau,
  take an elimination step: extrapolate past zero on N through the reference
  point, pull the target slightly toward x* (factor lam) to protect small
  trapped coordinates, and augment along the decomposition term with the most
  progress on the worst ratio's coordinate. An elimination step always zeroes
  a nonbasic or untrapped basic coordinate, so either supp(x_N) shrinks or T
  grows.

The reference point resets on any progress event: when T changes, and also
when supp(x_N) shrank since the reference was taken. The latter reset keeps
already-zeroed nonbasic coordinates at zero in the elimination extrapolation
(their reference value is zero too); extrapolating through a stale reference
would target negative values there, and a conformal step toward such a target
can degenerate to a zero-length maximal step, which is not a circuit-walk
step. With this rule every reference window ends with a progress event and
contains at most one elimination, so a walk has at most

    n + 2m * (ceil(m * ln(8 m^4)) + 1)

steps (2m + ... in restricted vertex-to-vertex mode, which first drops all
columns outside supp(start) | supp(target)).

All step directions in the main loop are nonpositive on N, which makes the
walks monotone for every objective minimized at the target vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from mpmath import mp

from .circuits import ElementaryVector, conformal_decompose, extract_elementary
from .errors import (
    InternalInvariantViolation,
    NoCircuit,
    NotAVertex,
    StartInfeasible,
    TargetInvalid,
)
from .linalg import Matrix, Vec, ZERO, is_zero, rank, supp, vec_sub
from .polyhedron import (
    PolyhedronInstance,
    VertexWithBasis,
    basis_from_vertex,
    is_feasible,
    max_step,
    solve_lp,
)

ANY_FEASIBLE_START = "any_feasible_start"
VERTEX_TO_VERTEX_RESTRICTED = "vertex_to_vertex_restricted"
MODES = (ANY_FEASIBLE_START, VERTEX_TO_VERTEX_RESTRICTED)

PHASE1 = "phase1"
NORM_REDUCTION = "norm_reduction"
ELIMINATION = "elimination"

PHASE_SUPPORT_REDUCTION = "support_reduction"
PHASE_MAIN = "main"
PHASE_DONE = "done"


@dataclass(frozen=True)
class AlgorithmConstants:
    """Threshold constants; certified runs pin tau = (2m)^-3 and lam = (2m)^-2."""

    tau: Fraction
    lam: Fraction
    m: int
    certified: bool = True

    def __post_init__(self) -> None:
        if self.certified:
            if self.tau != _certified_tau(self.m) or self.lam != _certified_lam(self.m):
                raise ValueError(
                    "certified constants must be tau=(2m)^-3 and lam=(2m)^-2; "
                    "use experimental() to override"
                )

    @classmethod
    def for_m(cls, m: int) -> "AlgorithmConstants":
        return cls(tau=_certified_tau(m), lam=_certified_lam(m), m=m)

    @classmethod
    def experimental(cls, tau, lam, m: int) -> "AlgorithmConstants":
        return cls(tau=Fraction(tau), lam=Fraction(lam), m=m, certified=False)


def _certified_tau(m: int) -> Fraction:
    return Fraction(1, (2 * m) ** 3)


def _certified_lam(m: int) -> Fraction:
    return Fraction(1, (2 * m) ** 2)


def norm_reduction_window_cap(m: int) -> int:
    """Smallest integer >= m * ln(8 m^4), evaluated at 50 decimal digits."""
    with mp.workdps(50):
        return int(mp.ceil(m * mp.log(8 * m**4)))


def phase2_step_budget(m: int) -> int:
    return 2 * m * (norm_reduction_window_cap(m) + 1)


def walk_length_budget(m: int, n: int, mode: str) -> int:
    """Hard upper bound on the number of steps of a certified walk."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    head = 2 * m if mode == VERTEX_TO_VERTEX_RESTRICTED else n
    return head + phase2_step_budget(m)


@dataclass(frozen=True)
class EliminationData:
    """Extrapolation data of one elimination step."""

    q: int
    rho: Fraction
    y: Vec
    z: Vec


@dataclass(frozen=True)
class WalkStep:
    kind: str
    direction: ElementaryVector
    step_length: Fraction
    blocking_index: int
    trapped_before: tuple[int, ...]
    trapped_after: tuple[int, ...]
    decomposition_size: int
    chosen_term: int | None
    elimination_data: EliminationData | None = None


@dataclass(frozen=True)
class AlgorithmState:
    x: Vec
    iteration: int
    phase: str
    trapped: frozenset[int]
    reference_index: int
    reference_point: Vec
    target: VertexWithBasis
    nonbasic: tuple[int, ...]


@dataclass(frozen=True)
class WalkTrace:
    instance: PolyhedronInstance
    start: Vec
    target: VertexWithBasis
    steps: tuple[WalkStep, ...]
    constants: AlgorithmConstants
    mode: str
    objective: Vec | None = None

    @property
    def length(self) -> int:
        return len(self.steps)


# ---------------------------------------------------------------------------
# state helpers
# ---------------------------------------------------------------------------


def _supp_on(x: Vec, indices) -> tuple[int, ...]:
    return tuple(j for j in indices if x[j] != 0)


def _ratio(numerator: Fraction, denominator: Fraction) -> Fraction:
    """Componentwise ratio with the 0/0 -> 0 convention."""
    if denominator == 0:
        if numerator != 0:
            raise InternalInvariantViolation(
                "positive coordinate with zero reference value"
            )
        return ZERO
    return numerator / denominator


def _trapped_set(x: Vec, target: VertexWithBasis, m: int) -> frozenset[int]:
    return frozenset(j for j in target.basis if x[j] <= m * target.point[j])


def start_state(P: PolyhedronInstance, start: Vec, target: VertexWithBasis) -> AlgorithmState:
    nonbasic = tuple(j for j in range(P.n) if j not in set(target.basis))
    return AlgorithmState(
        x=start,
        iteration=0,
        phase=PHASE_SUPPORT_REDUCTION,
        trapped=frozenset(),
        reference_index=0,
        reference_point=start,
        target=target,
        nonbasic=nonbasic,
    )


# ---------------------------------------------------------------------------
# individual steps
# ---------------------------------------------------------------------------


def phase1_step(
    P: PolyhedronInstance, state: AlgorithmState
) -> tuple[AlgorithmState, WalkStep] | None:
    """One support-reduction augmentation, or None once |supp(x_N)| <= m."""
    live = _supp_on(state.x, state.nonbasic)
    if len(live) <= P.m:
        return None
    try:
        g = _phase1_direction(P.A, live)
    except NoCircuit as exc:  # pragma: no cover - impossible for |live| > m
        raise InternalInvariantViolation(
            f"no circuit inside {len(live)} nonbasic columns"
        ) from exc
    result = max_step(P, state.x, g)
    new_live = _supp_on(result.new_point, state.nonbasic)
    if not set(new_live) < set(live):
        raise InternalInvariantViolation("support reduction did not shrink supp(x_N)")
    step = WalkStep(
        kind=PHASE1,
        direction=g,
        step_length=result.step_length,
        blocking_index=result.blocking_index,
        trapped_before=(),
        trapped_after=(),
        decomposition_size=0,
        chosen_term=None,
    )
    new_state = replace(state, x=result.new_point, iteration=state.iteration + 1)
    return new_state, step


def _phase1_direction(A: Matrix, live) -> ElementaryVector:
    g = extract_elementary(A, live)
    if not g.has_negative_entry():
        g = g.negate()
    return g


def update_trapped(
    state: AlgorithmState, constants: AlgorithmConstants, strict: bool = True
) -> AlgorithmState:
    """Recompute the trapped set and reset the reference on progress.

    The reference also resets when supp(x_N) shrank since it was taken, so
    the elimination extrapolation never sees a positive reference value at an
    already-zeroed nonbasic coordinate (see the module docstring).
    """
    new_trapped = _trapped_set(state.x, state.target, constants.m)
    if strict and not new_trapped >= state.trapped:
        raise InternalInvariantViolation(
            f"trapped set lost {sorted(state.trapped - new_trapped)}"
        )
    support_now = _supp_on(state.x, state.nonbasic)
    support_ref = _supp_on(state.reference_point, state.nonbasic)
    if new_trapped != state.trapped or support_now != support_ref:
        return replace(
            state,
            trapped=new_trapped,
            reference_index=state.iteration,
            reference_point=state.x,
        )
    return replace(state, trapped=new_trapped)


def nonbasic_ratio_max(state: AlgorithmState) -> Fraction:
    return max(
        (_ratio(state.x[j], state.reference_point[j]) for j in state.nonbasic),
        default=ZERO,
    )


def norm_reduction_step(
    P: PolyhedronInstance,
    state: AlgorithmState,
    constants: AlgorithmConstants,
    strict: bool = True,
) -> tuple[AlgorithmState, WalkStep]:
    """Augment along the conformal term of x* - x with best weighted-l1 progress."""
    x, xstar = state.x, state.target.point
    N = state.nonbasic
    ref = state.reference_point
    decomposition = conformal_decompose(P.A, vec_sub(xstar, x))
    k = len(decomposition.terms)
    if k == 0:
        raise ValueError("walk is already at the target")
    if strict and k > constants.m:
        raise InternalInvariantViolation(f"decomposition size {k} exceeds m")
    chosen = -1
    best = None
    for idx, term in enumerate(decomposition.terms):
        weight = sum((_ratio(abs(term.direction[j]), ref[j]) for j in N), ZERO)
        if best is None or weight > best:
            best = weight
            chosen = idx
    g = decomposition.terms[chosen]
    if strict and any(g.direction[j] > 0 for j in N):
        raise InternalInvariantViolation("norm-reduction direction positive on N")
    norm_before = sum((_ratio(x[j], ref[j]) for j in N), ZERO)
    result = max_step(P, x, g)
    alpha = result.step_length
    if strict and not 1 <= alpha <= constants.m:
        raise InternalInvariantViolation(f"norm-reduction step length {alpha} not in [1, m]")
    norm_after = sum((_ratio(result.new_point[j], ref[j]) for j in N), ZERO)
    if strict and norm_after > (1 - Fraction(1, constants.m)) * norm_before:
        raise InternalInvariantViolation("norm-reduction contraction failed")
    trapped_after = _trapped_set(result.new_point, state.target, constants.m)
    if strict and not trapped_after >= state.trapped:
        raise InternalInvariantViolation("norm-reduction dropped a trapped coordinate")
    step = WalkStep(
        kind=NORM_REDUCTION,
        direction=g,
        step_length=alpha,
        blocking_index=result.blocking_index,
        trapped_before=tuple(sorted(state.trapped)),
        trapped_after=tuple(sorted(trapped_after)),
        decomposition_size=k,
        chosen_term=chosen,
    )
    new_state = replace(state, x=result.new_point, iteration=state.iteration + 1)
    return new_state, step


def compute_elimination_target(
    x: Vec,
    reference: Vec,
    xstar: Vec,
    nonbasic,
    constants: AlgorithmConstants,
) -> EliminationData:
    """Extrapolation data for an elimination step.

    q maximizes x_j / reference_j over the nonbasic coordinates (0/0 reads as
    zero; ties go to the smallest index) and rho is that ratio. y extrapolates
    x past zero on the nonbasic side: y = x + rho/(1-rho) (x - reference), so
    y_q = 0 and y_N <= 0. z = y + lam (x* - y) pulls toward the target to keep
    small trapped coordinates from being dragged below zero; z_q = 0 as well.
    """
    q = -1
    rho = ZERO
    for j in nonbasic:
        r = _ratio(x[j], reference[j])
        if q < 0 or r > rho:
            q, rho = j, r
    if q < 0 or rho == 0:
        raise ValueError("all nonbasic coordinates are zero; nothing to eliminate")
    factor = rho / (1 - rho)
    y = tuple(xj + factor * (xj - rj) for xj, rj in zip(x, reference, strict=True))
    z = tuple(yj + constants.lam * (sj - yj) for yj, sj in zip(y, xstar, strict=True))
    return EliminationData(q=q, rho=rho, y=y, z=z)


def elimination_step(
    P: PolyhedronInstance,
    state: AlgorithmState,
    constants: AlgorithmConstants,
    strict: bool = True,
) -> tuple[AlgorithmState, WalkStep]:
    """Force a nonbasic or untrapped basic coordinate to zero."""
    x, xstar = state.x, state.target.point
    N = state.nonbasic
    data = compute_elimination_target(x, state.reference_point, xstar, N, constants)
    if strict:
        if data.rho > constants.tau:
            raise InternalInvariantViolation("elimination fired with ratio above tau")
        if any(data.y[j] > 0 for j in N) or any(data.z[j] > 0 for j in N):
            raise InternalInvariantViolation("extrapolation target positive on N")
        if data.y[data.q] != 0 or data.z[data.q] != 0:
            raise InternalInvariantViolation("extrapolation did not zero coordinate q")
    decomposition = conformal_decompose(P.A, vec_sub(data.z, x))
    k = len(decomposition.terms)
    if strict and k > constants.m:
        raise InternalInvariantViolation(f"decomposition size {k} exceeds m")
    chosen = -1
    best = None
    for idx, term in enumerate(decomposition.terms):
        progress = -term.direction[data.q]
        if best is None or progress > best:
            best = progress
            chosen = idx
    g = decomposition.terms[chosen]
    if strict and g.direction[data.q] >= 0:
        raise InternalInvariantViolation("chosen term makes no progress on q")
    if strict and any(g.direction[j] > 0 for j in N):
        raise InternalInvariantViolation("elimination direction positive on N")
    result = max_step(P, x, g)
    alpha = result.step_length
    if strict and alpha > constants.m:
        raise InternalInvariantViolation(f"elimination step length {alpha} exceeds m")
    if strict and result.blocking_index in state.trapped:
        raise InternalInvariantViolation(
            f"elimination blocked at trapped coordinate {result.blocking_index}"
        )
    trapped_after = _trapped_set(result.new_point, state.target, constants.m)
    if strict and not trapped_after >= state.trapped:
        raise InternalInvariantViolation("elimination dropped a trapped coordinate")
    supp_before = set(_supp_on(x, N))
    supp_after = set(_supp_on(result.new_point, N))
    if strict and not (supp_after < supp_before or trapped_after > state.trapped):
        raise InternalInvariantViolation("elimination made no combinatorial progress")
    step = WalkStep(
        kind=ELIMINATION,
        direction=g,
        step_length=alpha,
        blocking_index=result.blocking_index,
        trapped_before=tuple(sorted(state.trapped)),
        trapped_after=tuple(sorted(trapped_after)),
        decomposition_size=k,
        chosen_term=chosen,
        elimination_data=data,
    )
    new_state = replace(state, x=result.new_point, iteration=state.iteration + 1)
    return new_state, step


# ---------------------------------------------------------------------------
# full runs
# ---------------------------------------------------------------------------


def _validate_target(P: PolyhedronInstance, target: VertexWithBasis) -> None:
    basis = tuple(sorted(target.basis))
    if len(basis) != P.m or len(set(basis)) != P.m:
        raise TargetInvalid(f"basis must have exactly {P.m} distinct indices")
    if any(j < 0 or j >= P.n for j in basis):
        raise TargetInvalid("basis index out of range")
    if not is_feasible(P, target.point):
        raise TargetInvalid("target point is not feasible")
    if not set(supp(target.point)) <= set(basis):
        raise TargetInvalid("target support is not contained in its basis")
    if rank(P.A.column_submatrix(basis)) != P.m:
        raise TargetInvalid("basis columns are linearly dependent")


def _run_core(
    P: PolyhedronInstance,
    start: Vec,
    target: VertexWithBasis,
    constants: AlgorithmConstants,
    step_budget: int,
    strict: bool,
) -> list[WalkStep]:
    state = start_state(P, start, target)
    steps: list[WalkStep] = []
    hard_cap = step_budget if strict else 4 * step_budget + 64

    while True:
        outcome = phase1_step(P, state)
        if outcome is None:
            break
        state, step = outcome
        steps.append(step)
        if len(steps) > hard_cap:
            raise InternalInvariantViolation("phase-1 step budget exceeded")

    state = replace(
        state,
        phase=PHASE_MAIN,
        reference_index=state.iteration,
        reference_point=state.x,
    )
    window_cap = norm_reduction_window_cap(constants.m)
    consecutive_nr = 0
    while state.x != target.point:
        previous_reference = state.reference_index
        state = update_trapped(state, constants, strict=strict)
        if state.reference_index != previous_reference:
            consecutive_nr = 0
        if nonbasic_ratio_max(state) > constants.tau:
            state, step = norm_reduction_step(P, state, constants, strict=strict)
            consecutive_nr += 1
            if strict and consecutive_nr > window_cap:
                raise InternalInvariantViolation(
                    "norm-reduction window exceeded its step cap"
                )
        else:
            state, step = elimination_step(P, state, constants, strict=strict)
            consecutive_nr = 0
        steps.append(step)
        if len(steps) > hard_cap:
            raise InternalInvariantViolation("total step budget exceeded")
    return steps


def restrict_columns(
    P: PolyhedronInstance, u: Vec, v: VertexWithBasis
) -> tuple[PolyhedronInstance, tuple[int, ...]]:
    """Sub-instance on supp(u) | supp(v.point), plus the map back to [n].

    The sub-matrix is re-normalized (dependent rows dropped, rank certified).
    The index map lists, for each sub-instance column, its original index.
    """
    basis_from_vertex(P, u)
    _validate_target(P, v)
    keep = tuple(sorted(set(supp(u)) | set(supp(v.point))))
    if not keep:
        raise ValueError("both points are zero; nothing to restrict to")
    sub = PolyhedronInstance.build(P.A.column_submatrix(keep), P.b)
    return sub, keep


def _embed_vec(sub_vec: Vec, colmap: tuple[int, ...], n: int) -> Vec:
    full = [ZERO] * n
    for value, j in zip(sub_vec, colmap, strict=True):
        full[j] = value
    return tuple(full)


def _map_step(step: WalkStep, colmap: tuple[int, ...], n: int) -> WalkStep:
    direction = ElementaryVector(
        direction=_embed_vec(step.direction.direction, colmap, n),
        support=tuple(sorted(colmap[j] for j in step.direction.support)),
    )
    elimination = step.elimination_data
    if elimination is not None:
        elimination = EliminationData(
            q=colmap[elimination.q],
            rho=elimination.rho,
            y=_embed_vec(elimination.y, colmap, n),
            z=_embed_vec(elimination.z, colmap, n),
        )
    return WalkStep(
        kind=step.kind,
        direction=direction,
        step_length=step.step_length,
        blocking_index=colmap[step.blocking_index],
        trapped_before=tuple(sorted(colmap[j] for j in step.trapped_before)),
        trapped_after=tuple(sorted(colmap[j] for j in step.trapped_after)),
        decomposition_size=step.decomposition_size,
        chosen_term=step.chosen_term,
        elimination_data=elimination,
    )


def run_walk(
    P: PolyhedronInstance,
    start: Vec,
    target: VertexWithBasis,
    mode: str = ANY_FEASIBLE_START,
    constants: AlgorithmConstants | None = None,
) -> WalkTrace:
    """A circuit walk from start to target.point, replayable step by step.

    In restricted mode the start must itself be a vertex; the walk is built
    on the column-restricted sub-instance and mapped back to full indices
    (directions stay elementary and steps stay maximal under the embedding).
    Custom constants are only honored in the unrestricted mode; they mark the
    trace as uncertified and disable the internal invariant assertions.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    _validate_target(P, target)
    if not is_feasible(P, start):
        raise StartInfeasible("start point is not feasible")

    if mode == VERTEX_TO_VERTEX_RESTRICTED:
        if constants is not None and not constants.certified:
            raise ValueError("experimental constants are not supported in restricted mode")
        basis_from_vertex(P, start)  # NotAVertex propagates
        if start == target.point:
            return WalkTrace(
                instance=P,
                start=start,
                target=target,
                steps=(),
                constants=AlgorithmConstants.for_m(P.m),
                mode=mode,
            )
        sub, colmap = restrict_columns(P, start, target)
        sub_start = tuple(start[j] for j in colmap)
        sub_target = basis_from_vertex(sub, tuple(target.point[j] for j in colmap))
        sub_constants = AlgorithmConstants.for_m(sub.m)
        budget = walk_length_budget(sub.m, sub.n, ANY_FEASIBLE_START)
        steps = _run_core(sub, sub_start, sub_target, sub_constants, budget, strict=True)
        mapped_basis = tuple(sorted(colmap[j] for j in sub_target.basis))
        return WalkTrace(
            instance=P,
            start=start,
            target=VertexWithBasis(point=target.point, basis=mapped_basis),
            steps=tuple(_map_step(s, colmap, P.n) for s in steps),
            constants=sub_constants,
            mode=mode,
        )

    if constants is None:
        constants = AlgorithmConstants.for_m(P.m)
    if constants.m != P.m:
        raise ValueError("constants were built for a different m")
    budget = walk_length_budget(P.m, P.n, mode)
    steps = _run_core(P, start, target, constants, budget, strict=constants.certified)
    return WalkTrace(
        instance=P,
        start=start,
        target=VertexWithBasis(point=target.point, basis=tuple(sorted(target.basis))),
        steps=tuple(steps),
        constants=constants,
        mode=mode,
    )


def solve_and_walk(P: PolyhedronInstance, start: Vec, c: Vec) -> WalkTrace:
    """Solve min c.x over P, then walk from start to the optimal vertex."""
    if len(c) != P.n:
        raise ValueError("objective has the wrong dimension")
    target = solve_lp(P, c)
    trace = run_walk(P, start, target, mode=ANY_FEASIBLE_START)
    return replace(trace, objective=tuple(Fraction(v) for v in c))
