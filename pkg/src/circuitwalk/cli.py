"""Command-line front end.

Subcommands: walk, verify, bench, oracle, circuits, kappa. Exit codes are
stable (scripts rely on them):

    0  success
    1  unexpected internal error
    2  parse or validation error (bad file, bad flags, inconsistent dims)
    3  infeasible: empty polyhedron, inconsistent rows, infeasible start
    4  objective unbounded below
    5  verification failed
    6  enumeration budget exceeded
    7  invalid start/target (not a vertex, bad basis)
    8  oracle inconclusive within budgets

The enumeration budget default can be overridden through the
CIRCUITWALK_ENUM_BUDGET environment variable.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
import time
from fractions import Fraction

from . import formats
from .circuits import circuit_imbalance, enumerate_circuits
from .errors import (
    BudgetExceeded,
    CircuitWalkError,
    EmptyPolyhedron,
    Infeasible,
    InternalInvariantViolation,
    NoCircuit,
    NotAVertex,
    NotDualFeasible,
    StartInfeasible,
    TargetInvalid,
    TooFewRows,
    UnboundedDirection,
    UnboundedLP,
    ZeroStep,
)
from .formats import FormatError
from .instances import cube_vertex, gen_cube, gen_random_rational, gen_transportation
from .linalg import Vec, format_rational, parse_rational
from .oracle import shortest_walk
from .polyhedron import PolyhedronInstance, VertexWithBasis, basis_from_vertex, find_feasible_point, solve_lp
from .verify import certificate_report, verify_monotone, verify_trace
from .walk import (
    ANY_FEASIBLE_START,
    ELIMINATION,
    NORM_REDUCTION,
    PHASE1,
    VERTEX_TO_VERTEX_RESTRICTED,
    run_walk,
    solve_and_walk,
    walk_length_budget,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_UNBOUNDED = 4
EXIT_VERIFY_FAILED = 5
EXIT_BUDGET = 6
EXIT_BAD_ENDPOINT = 7
EXIT_INCONCLUSIVE = 8

_MODE_FLAGS = {"any": ANY_FEASIBLE_START, "restricted": VERTEX_TO_VERTEX_RESTRICTED}

BENCH_COLUMNS = [
    "family",
    "m",
    "n",
    "seed",
    "walk_length",
    "budget",
    "phase1_steps",
    "norm_reduction_steps",
    "eliminations",
    "max_decomposition_size",
    "runtime_seconds",
]


def _parse_vector(text: str, n: int) -> Vec:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise FormatError(f"expected {n} comma-separated rationals, got {len(parts)}")
    return tuple(parse_rational(p) for p in parts)


def _load_document(path: str) -> formats.InstanceDocument:
    with open(path, "r", encoding="utf-8") as handle:
        return formats.parse_instance_document(handle.read())


def _random_nonnegative_objective(n: int, rng: random.Random) -> Vec:
    return tuple(Fraction(rng.randint(0, 9), rng.randint(1, 4)) for _ in range(n))


def _resolve_target(
    doc: formats.InstanceDocument, args
) -> tuple[VertexWithBasis | None, Vec | None]:
    """(explicit target, objective): exactly one is non-None."""
    P = doc.instance
    if args.target is not None:
        point = _parse_vector(args.target, P.n)
        return basis_from_vertex(P, point), None
    if doc.target_vertex is not None:
        if doc.target_basis is not None:
            return VertexWithBasis(doc.target_vertex, doc.target_basis), None
        return basis_from_vertex(P, doc.target_vertex), None
    if args.objective is not None:
        return None, _parse_vector(args.objective, P.n)
    if doc.objective is not None:
        return None, doc.objective
    rng = random.Random(args.seed)
    return None, _random_nonnegative_objective(P.n, rng)


def cmd_walk(args) -> int:
    doc = _load_document(args.instance)
    P = doc.instance
    if args.start is not None:
        start = _parse_vector(args.start, P.n)
    elif doc.start is not None:
        start = doc.start
    else:
        start = find_feasible_point(P)
    mode = _MODE_FLAGS[args.mode]
    target, objective = _resolve_target(doc, args)
    if target is not None:
        trace = run_walk(P, start, target, mode=mode)
    elif mode == VERTEX_TO_VERTEX_RESTRICTED:
        trace = run_walk(P, start, solve_lp(P, objective), mode=mode)
    else:
        trace = solve_and_walk(P, start, objective)
    text = formats.serialize_trace(trace)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(text)
    budget = walk_length_budget(P.m, P.n, mode)
    print(f"walk length {trace.length} (budget {budget}) mode {trace.mode} -> {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    doc = _load_document(args.instance)
    P = doc.instance
    with open(args.trace, "r", encoding="utf-8") as handle:
        trace = formats.parse_trace(handle.read(), P)
    certificate = verify_trace(P, trace)
    sys.stdout.write(certificate_report(certificate))
    ok = certificate.overall
    if args.objective is not None:
        objective = _parse_vector(args.objective, P.n)
        results = verify_monotone(P, trace, objective)
        for result in results:
            status = "pass" if result.passed else "FAIL"
            print(f"  {result.name:<18} {status}")
            ok = ok and result.passed
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _parse_range(text: str) -> range:
    lo, _, hi = text.partition(":")
    low = int(lo)
    high = int(hi) if hi else low
    return range(low, high + 1)


def _step_stats(trace) -> tuple[int, int, int, int]:
    phase1 = sum(1 for s in trace.steps if s.kind == PHASE1)
    reductions = sum(1 for s in trace.steps if s.kind == NORM_REDUCTION)
    eliminations = sum(1 for s in trace.steps if s.kind == ELIMINATION)
    max_k = max((s.decomposition_size for s in trace.steps), default=0)
    return phase1, reductions, eliminations, max_k


def _bench_trial(family: str, size: tuple[int, int], seed: int, mode: str):
    """Build one (instance, start, target) trial for the sweep."""
    rng = random.Random(seed)
    if family == "cube":
        d = size[0]
        P = gen_cube(d)
        start = cube_vertex(d, [rng.randint(0, 1) for _ in range(d)])
        target = cube_vertex(d, [rng.randint(0, 1) for _ in range(d)])
        return P, start.point, target
    if family == "transportation":
        p = q = size[0]
        P = gen_transportation(p, q, seed)
        start = basis_from_vertex(P, find_feasible_point(P))
        target = solve_lp(P, _random_nonnegative_objective(P.n, rng))
        return P, start.point, target
    if family == "random":
        m, n = size
        P, start = gen_random_rational(m, n, 6, seed)
        target = solve_lp(P, _random_nonnegative_objective(P.n, rng))
        return P, start.point, target
    raise ValueError(f"unknown family {family!r}")


def cmd_bench(args) -> int:
    mode = _MODE_FLAGS[args.mode]
    sizes: list[tuple[int, int]]
    if args.family == "random":
        sizes = [(m, n) for m in _parse_range(args.m_range) for n in _parse_range(args.n_range) if n > m]
    else:
        sizes = [(v, v) for v in _parse_range(args.m_range)]
    with open(args.out, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(BENCH_COLUMNS)
        for size in sizes:
            for trial in range(args.trials):
                seed = args.seed * 1000 + trial
                P, start, target = _bench_trial(args.family, size, seed, mode)
                began = time.perf_counter()
                trace = run_walk(P, start, target, mode=mode)
                elapsed = time.perf_counter() - began
                certificate = verify_trace(P, trace)
                if not certificate.overall:
                    print(
                        "verification failed; reproduce with: "
                        f"circuitwalk bench --family {args.family} "
                        f"--m-range {size[0]}:{size[0]} --n-range {size[1]}:{size[1]} "
                        f"--trials 1 --seed {seed // 1000} --mode {args.mode}",
                        file=sys.stderr,
                    )
                    return EXIT_VERIFY_FAILED
                phase1, reductions, eliminations, max_k = _step_stats(trace)
                writer.writerow(
                    [
                        args.family,
                        P.m,
                        P.n,
                        seed,
                        trace.length,
                        walk_length_budget(P.m, P.n, mode),
                        phase1,
                        reductions,
                        eliminations,
                        max_k,
                        f"{elapsed:.6f}",
                    ]
                )
    print(f"bench complete -> {args.out}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    doc = _load_document(args.instance)
    P = doc.instance
    start = _parse_vector(args.start, P.n) if args.start else doc.start
    target = _parse_vector(args.target, P.n) if args.target else doc.target_vertex
    if start is None or target is None:
        raise FormatError("oracle needs --start and --target (or file keys)")
    walk = shortest_walk(P, start, target, args.depth_budget, args.node_budget)
    if walk is None:
        print("not found within budgets (inconclusive)")
        return EXIT_INCONCLUSIVE
    print(f"shortest walk length {walk.length}")
    return EXIT_OK


def cmd_circuits(args) -> int:
    doc = _load_document(args.instance)
    circuits = enumerate_circuits(doc.instance.A, budget=args.budget)
    print(f"{len(circuits)} circuits")
    for circuit in circuits:
        entries = ",".join(format_rational(v) for v in circuit.direction)
        print(f"  support {list(circuit.support)} direction {entries}")
    return EXIT_OK


def cmd_kappa(args) -> int:
    doc = _load_document(args.instance)
    value = circuit_imbalance(doc.instance.A, budget=args.budget)
    print(format_rational(value))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circuitwalk",
        description="construct, verify and cross-check circuit walks on {x : Ax=b, x>=0}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    walk = sub.add_parser("walk", help="construct a circuit walk and write a trace file")
    walk.add_argument("instance")
    walk.add_argument("--start", help="comma-separated rationals")
    walk.add_argument("--target", help="comma-separated rationals (a vertex)")
    walk.add_argument("--objective", help="walk to an optimal vertex of this objective")
    walk.add_argument("--mode", choices=sorted(_MODE_FLAGS), default="any")
    walk.add_argument("--seed", type=int, default=0, help="seed for the fallback random objective")
    walk.add_argument("--out", required=True)
    walk.set_defaults(func=cmd_walk)

    verify = sub.add_parser("verify", help="check a trace file against its instance")
    verify.add_argument("instance")
    verify.add_argument("trace")
    verify.add_argument("--objective", help="also check monotonicity for this objective")
    verify.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="seeded sweep; every trial is verified")
    bench.add_argument("--family", choices=["cube", "transportation", "random"], required=True)
    bench.add_argument("--m-range", default="2:3", help="A:B inclusive (cube/transportation size, or m)")
    bench.add_argument("--n-range", default="5:8", help="A:B inclusive (random family only)")
    bench.add_argument("--trials", type=int, default=3)
    bench.add_argument("--seed", type=int, default=1)
    bench.add_argument("--mode", choices=sorted(_MODE_FLAGS), default="any")
    bench.add_argument("--out", required=True)
    bench.set_defaults(func=cmd_bench)

    oracle = sub.add_parser("oracle", help="BFS shortest circuit walk on a tiny instance")
    oracle.add_argument("instance")
    oracle.add_argument("--start")
    oracle.add_argument("--target")
    oracle.add_argument("--depth-budget", type=int, default=8)
    oracle.add_argument("--node-budget", type=int, default=20000)
    oracle.set_defaults(func=cmd_oracle)

    circuits = sub.add_parser("circuits", help="enumerate all circuits of the instance")
    circuits.add_argument("instance")
    circuits.add_argument("--budget", type=int, default=None)
    circuits.set_defaults(func=cmd_circuits)

    kappa = sub.add_parser("kappa", help="exact circuit imbalance of the instance")
    kappa.add_argument("instance")
    kappa.add_argument("--budget", type=int, default=None)
    kappa.set_defaults(func=cmd_kappa)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (Infeasible, EmptyPolyhedron, StartInfeasible, TooFewRows) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except UnboundedLP as exc:
        print(f"unbounded objective: {exc}", file=sys.stderr)
        return EXIT_UNBOUNDED
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (NotAVertex, TargetInvalid, NotDualFeasible) as exc:
        print(f"invalid endpoint: {exc}", file=sys.stderr)
        return EXIT_BAD_ENDPOINT
    except (InternalInvariantViolation, ZeroStep, UnboundedDirection, NoCircuit) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except CircuitWalkError as exc:  # any remaining library error
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
