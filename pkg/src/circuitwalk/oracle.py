"""Brute-force ground truth on tiny instances.

Breadth-first search over the maximal-augmentation successor relation, using
exhaustive circuit enumeration and exact-point deduplication. Successors are
directed: a circuit walk is not reversible, so reachability is asymmetric.
Budgets are mandatory; an exhausted budget is an inconclusive outcome, not a
nonexistence proof.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .circuits import ElementaryVector, enumerate_circuits
from .errors import UnboundedDirection, ZeroStep
from .linalg import Vec
from .polyhedron import PolyhedronInstance, is_feasible, max_step


@dataclass(frozen=True)
class WalkGraphNode:
    point: Vec
    depth: int
    parent: "WalkGraphNode | None" = None
    via: ElementaryVector | None = None


@dataclass(frozen=True)
class OracleStep:
    direction: ElementaryVector
    step_length: Fraction
    blocking_index: int
    point_after: Vec


@dataclass(frozen=True)
class OracleWalk:
    length: int
    steps: tuple[OracleStep, ...]


def successors(
    P: PolyhedronInstance, x: Vec, circuits
) -> list[tuple[ElementaryVector, Vec]]:
    """Points reachable by one maximal augmentation; zero and unbounded
    directions are pruned. Both orientations of each circuit are tried."""
    out = []
    for circuit in circuits:
        for oriented in (circuit, circuit.negate()):
            try:
                result = max_step(P, x, oriented)
            except (ZeroStep, UnboundedDirection):
                continue
            out.append((oriented, result.new_point))
    return out


def shortest_walk(
    P: PolyhedronInstance,
    start: Vec,
    target: Vec,
    depth_budget: int,
    node_budget: int,
    circuits=None,
) -> OracleWalk | None:
    """A shortest circuit walk from start to target, or None within budgets.

    BFS with exact-point deduplication, so a returned walk is minimal among
    all walks of length <= depth_budget. None means the search was cut off by
    a budget before reaching the target.
    """
    if depth_budget < 0 or node_budget <= 0:
        raise ValueError("budgets must be positive")
    if not is_feasible(P, start) or not is_feasible(P, target):
        raise ValueError("start and target must be feasible")
    if start == target:
        return OracleWalk(length=0, steps=())
    if circuits is None:
        circuits = enumerate_circuits(P.A)
    node = WalkGraphNode(point=start, depth=0)
    queue: deque[WalkGraphNode] = deque([node])
    seen = {start}
    expanded = 0
    while queue:
        node = queue.popleft()
        if node.depth >= depth_budget:
            continue
        if expanded >= node_budget:
            return None
        expanded += 1
        for direction, point in successors(P, node.point, circuits):
            if point in seen:
                continue
            seen.add(point)
            child = WalkGraphNode(
                point=point, depth=node.depth + 1, parent=node, via=direction
            )
            if point == target:
                return _reconstruct(P, child)
            queue.append(child)
    return None


def _reconstruct(P: PolyhedronInstance, node: WalkGraphNode) -> OracleWalk:
    chain: list[WalkGraphNode] = []
    cursor: WalkGraphNode | None = node
    while cursor is not None:
        chain.append(cursor)
        cursor = cursor.parent
    chain.reverse()
    steps = []
    for parent, child in zip(chain, chain[1:]):
        result = max_step(P, parent.point, child.via)
        steps.append(
            OracleStep(
                direction=child.via,
                step_length=result.step_length,
                blocking_index=result.blocking_index,
                point_after=result.new_point,
            )
        )
    return OracleWalk(length=len(steps), steps=tuple(steps))
