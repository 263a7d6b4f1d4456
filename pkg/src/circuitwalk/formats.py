"""Text formats: instance documents, line-delimited trace files, digests.

Rationals are serialized as "p/q" or "p" strings end to end; nothing is ever
rendered as a float, so parse(serialize(x)) reproduces x bit for bit. All
canonical JSON uses sorted keys and compact separators, which makes digests
and byte-level round-trips stable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .circuits import ElementaryVector
from .errors import CircuitWalkError
from .linalg import Matrix, Vec, format_rational, parse_rational, supp
from .polyhedron import PolyhedronInstance, VertexWithBasis
from .walk import (
    MODES,
    AlgorithmConstants,
    EliminationData,
    WalkStep,
    WalkTrace,
    walk_length_budget,
)

TRACE_FORMAT_VERSION = 1


class FormatError(CircuitWalkError):
    """Malformed instance or trace document."""


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _vec_to_strings(v: Vec) -> list[str]:
    return [format_rational(a) for a in v]


def _vec_from_strings(items, expected_length: int | None = None) -> Vec:
    if not isinstance(items, list):
        raise FormatError("expected a list of rational strings")
    try:
        values = tuple(parse_rational(a) for a in items)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if expected_length is not None and len(values) != expected_length:
        raise FormatError(f"expected {expected_length} entries, got {len(values)}")
    return values


# ---------------------------------------------------------------------------
# instance documents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InstanceDocument:
    """A parsed instance file: the normalized instance plus optional extras."""

    instance: PolyhedronInstance
    start: Vec | None = None
    target_vertex: Vec | None = None
    target_basis: tuple[int, ...] | None = None
    objective: Vec | None = None


def instance_to_dict(P: PolyhedronInstance) -> dict:
    flat = [format_rational(v) for row in P.A.entries for v in row]
    return {"m": P.m, "n": P.n, "A": flat, "b": _vec_to_strings(P.b)}


def serialize_instance(P: PolyhedronInstance) -> str:
    return _canonical_json(instance_to_dict(P)) + "\n"


def instance_digest(P: PolyhedronInstance) -> str:
    return hashlib.sha256(serialize_instance(P).encode()).hexdigest()


def parse_instance_document(text: str) -> InstanceDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise FormatError("instance document must be a JSON object")
    for key in ("m", "n", "A", "b"):
        if key not in data:
            raise FormatError(f"missing key {key!r}")
    m, n = data["m"], data["n"]
    if not isinstance(m, int) or not isinstance(n, int) or m < 1 or n < 1:
        raise FormatError("m and n must be positive integers")
    flat = _vec_from_strings(data["A"], m * n)
    b = _vec_from_strings(data["b"], m)
    A = Matrix(tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(m)))
    instance = PolyhedronInstance.build(A, b)

    def optional_vec(key: str) -> Vec | None:
        if key not in data or data[key] is None:
            return None
        return _vec_from_strings(data[key], instance.n)

    basis = None
    if data.get("target_basis") is not None:
        raw = data["target_basis"]
        if not isinstance(raw, list) or not all(isinstance(j, int) for j in raw):
            raise FormatError("target_basis must be a list of integers")
        basis = tuple(sorted(raw))
    return InstanceDocument(
        instance=instance,
        start=optional_vec("start"),
        target_vertex=optional_vec("target_vertex"),
        target_basis=basis,
        objective=optional_vec("objective"),
    )


# ---------------------------------------------------------------------------
# trace files
# ---------------------------------------------------------------------------


def _step_record(index: int, step: WalkStep) -> dict:
    elimination = None
    if step.elimination_data is not None:
        elimination = {
            "q": step.elimination_data.q,
            "rho": format_rational(step.elimination_data.rho),
            "y": _vec_to_strings(step.elimination_data.y),
            "z": _vec_to_strings(step.elimination_data.z),
        }
    return {
        "record": "step",
        "index": index,
        "kind": step.kind,
        "direction": _vec_to_strings(step.direction.direction),
        "support": list(step.direction.support),
        "alpha": format_rational(step.step_length),
        "blocking": step.blocking_index,
        "trapped_before": list(step.trapped_before),
        "trapped_after": list(step.trapped_after),
        "k": step.decomposition_size,
        "chosen": step.chosen_term,
        "elimination": elimination,
    }


def serialize_trace(trace: WalkTrace) -> str:
    """Line-delimited records: header, one line per step, footer."""
    header = {
        "record": "header",
        "version": TRACE_FORMAT_VERSION,
        "instance": instance_digest(trace.instance),
        "mode": trace.mode,
        "m": trace.constants.m,
        "tau": format_rational(trace.constants.tau),
        "lambda": format_rational(trace.constants.lam),
        "certified": trace.constants.certified,
        "start": _vec_to_strings(trace.start),
        "target": _vec_to_strings(trace.target.point),
        "target_basis": list(trace.target.basis),
        "objective": None if trace.objective is None else _vec_to_strings(trace.objective),
    }
    footer = {
        "record": "footer",
        "final": _vec_to_strings(trace.target.point),
        "length": trace.length,
        "budget": walk_length_budget(
            trace.instance.m, trace.instance.n, trace.mode
        ),
    }
    lines = [_canonical_json(header)]
    lines.extend(
        _canonical_json(_step_record(i, step)) for i, step in enumerate(trace.steps)
    )
    lines.append(_canonical_json(footer))
    return "\n".join(lines) + "\n"


def trace_digest(trace: WalkTrace) -> str:
    return hashlib.sha256(serialize_trace(trace).encode()).hexdigest()


def _parse_step(data: dict, n: int) -> WalkStep:
    direction = _vec_from_strings(data["direction"], n)
    support = tuple(data["support"])
    if support != supp(direction):
        raise FormatError("recorded support does not match the direction")
    elimination = None
    if data.get("elimination") is not None:
        raw = data["elimination"]
        elimination = EliminationData(
            q=raw["q"],
            rho=parse_rational(raw["rho"]),
            y=_vec_from_strings(raw["y"], n),
            z=_vec_from_strings(raw["z"], n),
        )
    return WalkStep(
        kind=data["kind"],
        direction=ElementaryVector(direction=direction, support=support),
        step_length=parse_rational(data["alpha"]),
        blocking_index=data["blocking"],
        trapped_before=tuple(data["trapped_before"]),
        trapped_after=tuple(data["trapped_after"]),
        decomposition_size=data["k"],
        chosen_term=data["chosen"],
        elimination_data=elimination,
    )


def parse_trace(text: str, P: PolyhedronInstance) -> WalkTrace:
    """Rebuild a WalkTrace from its file form; validates against the instance."""
    records = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {line_number}: invalid JSON: {exc}") from None
    if len(records) < 2:
        raise FormatError("trace needs at least a header and a footer")
    header, *steps_raw, footer = records
    if header.get("record") != "header" or footer.get("record") != "footer":
        raise FormatError("first record must be a header and last a footer")
    if header.get("version") != TRACE_FORMAT_VERSION:
        raise FormatError(f"unsupported trace version {header.get('version')!r}")
    if header.get("instance") != instance_digest(P):
        raise FormatError("trace was recorded against a different instance")
    mode = header.get("mode")
    if mode not in MODES:
        raise FormatError(f"unknown mode {mode!r}")
    n = P.n
    if header["certified"]:
        constants = AlgorithmConstants.for_m(header["m"])
        if (
            parse_rational(header["tau"]) != constants.tau
            or parse_rational(header["lambda"]) != constants.lam
        ):
            raise FormatError("certified header carries non-certified constants")
    else:
        constants = AlgorithmConstants.experimental(
            parse_rational(header["tau"]), parse_rational(header["lambda"]), header["m"]
        )
    steps = []
    for expected_index, raw in enumerate(steps_raw):
        if raw.get("record") != "step":
            raise FormatError("interior records must be steps")
        if raw.get("index") != expected_index:
            raise FormatError("step indices must be consecutive from 0")
        steps.append(_parse_step(raw, n))
    if footer.get("length") != len(steps):
        raise FormatError("footer length does not match the number of steps")
    target_point = _vec_from_strings(header["target"], n)
    if _vec_from_strings(footer["final"], n) != target_point:
        raise FormatError("footer final point does not match the header target")
    objective = None
    if header.get("objective") is not None:
        objective = _vec_from_strings(header["objective"], n)
    return WalkTrace(
        instance=P,
        start=_vec_from_strings(header["start"], n),
        target=VertexWithBasis(
            point=target_point, basis=tuple(header["target_basis"])
        ),
        steps=tuple(steps),
        constants=constants,
        mode=mode,
        objective=objective,
    )
