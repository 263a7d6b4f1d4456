"""Independent certification of walk traces.

Every check re-derives its facts from (A, b) and the trace alone: directions
are re-certified elementary by rank computations, feasibility and maximality
are re-checked on the replayed points, and the recorded trapped sets are
tested against the claimed bound rather than trusted. Failures are reported
with witnesses, never thrown.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction

from .circuits import certify_elementary
from .errors import NotDualFeasible
from .formats import _canonical_json, serialize_trace
from .linalg import (
    Vec,
    ZERO,
    format_rational,
    solve_linear,
    supp,
    vec_add,
    vec_dot,
    vec_scale,
    vec_sub,
)
from .polyhedron import PolyhedronInstance, VertexWithBasis, is_feasible
from .walk import PHASE1, WalkStep, WalkTrace, walk_length_budget

STEP_CHECKS = ("step_elementary", "step_positive", "step_feasible", "step_maximal")
TRACE_CHECKS = STEP_CHECKS + (
    "endpoint",
    "trapped_bound",
    "trapped_monotone",
    "support_monotone",
    "phase2_sign",
    "length_budget",
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: dict


@dataclass(frozen=True)
class Certificate:
    trace_hash: str
    checks: tuple[CheckResult, ...]

    @property
    def overall(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> CheckResult:
        for result in self.checks:
            if result.name == name:
                return result
        raise KeyError(name)

    def failed_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.checks if not c.passed)

    @property
    def digest(self) -> str:
        payload = _canonical_json(
            {
                "trace_hash": self.trace_hash,
                "checks": [
                    {"name": c.name, "passed": c.passed, "witness": c.witness}
                    for c in self.checks
                ],
            }
        )
        return hashlib.sha256(payload.encode()).hexdigest()


def verify_step(P: PolyhedronInstance, x_before: Vec, step) -> list[CheckResult]:
    """Per-step checks: elementary direction, positive maximal feasible step.

    ``step`` only needs ``direction``, ``step_length`` and ``blocking_index``
    attributes, so oracle walks can be checked with the same code path.
    """
    direction = step.direction.direction
    alpha = step.step_length
    blocking = step.blocking_index
    results = []

    elementary = certify_elementary(P.A, direction) and step.direction.support == supp(
        direction
    )
    results.append(
        CheckResult(
            "step_elementary",
            elementary,
            {} if elementary else {"direction": [format_rational(v) for v in direction]},
        )
    )

    positive = alpha > 0
    results.append(
        CheckResult(
            "step_positive",
            positive,
            {} if positive else {"alpha": format_rational(alpha)},
        )
    )

    successor = vec_add(x_before, vec_scale(alpha, direction))
    feasible = is_feasible(P, successor)
    results.append(
        CheckResult(
            "step_feasible",
            feasible,
            {} if feasible else {"point": [format_rational(v) for v in successor]},
        )
    )

    maximal = (
        0 <= blocking < P.n
        and direction[blocking] < 0
        and successor[blocking] == 0
    )
    results.append(
        CheckResult(
            "step_maximal",
            maximal,
            {}
            if maximal
            else {
                "blocking": blocking,
                "value_after": format_rational(successor[blocking])
                if 0 <= blocking < P.n
                else None,
            },
        )
    )
    return results


def _replay(trace: WalkTrace) -> list[Vec]:
    points = [trace.start]
    for step in trace.steps:
        points.append(
            vec_add(points[-1], vec_scale(step.step_length, step.direction.direction))
        )
    return points


def verify_trace(P: PolyhedronInstance, trace: WalkTrace) -> Certificate:
    """Replay the trace and run the full certification checklist."""
    points = _replay(trace)
    m = P.m
    xstar = trace.target.point
    nonbasic = tuple(j for j in range(P.n) if j not in set(trace.target.basis))
    failures: dict[str, dict] = {}

    def record(name: str, witness: dict) -> None:
        failures.setdefault(name, witness)

    for i, step in enumerate(trace.steps):
        for result in verify_step(P, points[i], step):
            if not result.passed:
                record(result.name, {"step": i, **result.witness})

    if points[-1] != xstar:
        record(
            "endpoint",
            {"final": [format_rational(v) for v in points[-1]]},
        )

    main_steps = [
        (i, step) for i, step in enumerate(trace.steps) if step.kind != PHASE1
    ]

    for i, step in main_steps:
        for label, trapped, point in (
            ("before", step.trapped_before, points[i]),
            ("after", step.trapped_after, points[i + 1]),
        ):
            for t in trapped:
                if not (0 <= t < P.n) or point[t] > m * xstar[t]:
                    record(
                        "trapped_bound",
                        {
                            "step": i,
                            "when": label,
                            "t": t,
                            "x_t": format_rational(point[t]),
                            "target_t": format_rational(xstar[t]),
                        },
                    )

    chain: list[tuple[int, str, tuple[int, ...]]] = []
    for i, step in main_steps:
        chain.append((i, "before", step.trapped_before))
        chain.append((i, "after", step.trapped_after))
    for (i1, w1, first), (i2, w2, second) in zip(chain, chain[1:]):
        lost = sorted(set(first) - set(second))
        if lost:
            record(
                "trapped_monotone",
                {"step": i2, "when": w2, "lost": lost, "previous_step": i1},
            )

    previous_support: set[int] | None = None
    for i, step in main_steps:
        for point in (points[i], points[i + 1]):
            current = {j for j in nonbasic if point[j] != 0}
            if previous_support is not None and not current <= previous_support:
                record(
                    "support_monotone",
                    {"step": i, "grew_by": sorted(current - previous_support)},
                )
            previous_support = current

    for i, step in main_steps:
        bad = [j for j in nonbasic if step.direction.direction[j] > 0]
        if bad:
            record("phase2_sign", {"step": i, "positive_on": bad})

    budget = walk_length_budget(P.m, P.n, trace.mode)
    if trace.length > budget:
        record("length_budget", {"length": trace.length, "budget": budget})

    trace_hash = hashlib.sha256(serialize_trace(trace).encode()).hexdigest()
    checks = tuple(
        CheckResult(name, name not in failures, failures.get(name, {}))
        for name in TRACE_CHECKS
    )
    return Certificate(trace_hash=trace_hash, checks=checks)


def certificate_report(certificate: Certificate) -> str:
    lines = [f"trace {certificate.trace_hash}"]
    for check in certificate.checks:
        status = "pass" if check.passed else "FAIL"
        line = f"  {check.name:<18} {status}"
        if not check.passed:
            line += "  " + json.dumps(check.witness, sort_keys=True)
        lines.append(line)
    lines.append(f"overall {'pass' if certificate.overall else 'FAIL'}")
    lines.append(f"certificate {certificate.digest}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# monotonicity
# ---------------------------------------------------------------------------


def dual_certificate(P: PolyhedronInstance, basis, c: Vec) -> tuple[Vec, Vec]:
    """Split c = A^T y + s with s zero on the basis; NotDualFeasible if s_N < 0."""
    cols = tuple(sorted(basis))
    sub = P.A.column_submatrix(cols)
    c_basis = tuple(c[j] for j in cols)
    y = solve_linear(sub.transpose(), c_basis)
    s = vec_sub(c, P.A.transpose().matvec(y))
    for j in range(P.n):
        if j not in set(cols) and s[j] < 0:
            raise NotDualFeasible(f"reduced cost {format_rational(s[j])} at index {j}")
    return y, s


def verify_monotone(P: PolyhedronInstance, trace: WalkTrace, c: Vec) -> list[CheckResult]:
    """Check c.x is non-increasing across main-phase steps (all steps when
    the support-reduction phase is empty). Raises NotDualFeasible when c has
    no dual certificate for the trace's target basis."""
    y, s = dual_certificate(P, trace.target.basis, c)
    results = [
        CheckResult(
            "dual_feasible",
            True,
            {
                "y": [format_rational(v) for v in y],
                "s": [format_rational(v) for v in s],
            },
        )
    ]
    points = _replay(trace)
    witness: dict = {}
    monotone = True
    for i, step in enumerate(trace.steps):
        if step.kind == PHASE1:
            continue
        before = vec_dot(c, points[i])
        after = vec_dot(c, points[i + 1])
        if after > before:
            monotone = False
            witness = {
                "step": i,
                "before": format_rational(before),
                "after": format_rational(after),
            }
            break
    results.append(CheckResult("monotone", monotone, witness))
    return results


@dataclass(frozen=True)
class DualObjective:
    c: Vec
    y: Vec
    s: Vec


def sample_dual_objectives(
    P: PolyhedronInstance, target: VertexWithBasis, count: int, seed: int
) -> list[DualObjective]:
    """Seeded objectives c = A^T y + s with s_B = 0, s_N >= 0: each is
    minimized at the target vertex, and regeneration with the same seed is
    byte-identical."""
    rng = random.Random(seed)
    basis = set(target.basis)
    out = []
    for _ in range(count):
        y = tuple(
            Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(P.m)
        )
        s = tuple(
            ZERO if j in basis else Fraction(rng.randint(0, 9), rng.randint(1, 9))
            for j in range(P.n)
        )
        c = vec_add(P.A.transpose().matvec(y), s)
        out.append(DualObjective(c=c, y=y, s=s))
    return out
