"""Exception types shared across the package."""


class CircuitWalkError(Exception):
    """Base class for all library errors."""


class Infeasible(CircuitWalkError):
    """A linear system or basic solution has no admissible solution."""


class TooFewRows(CircuitWalkError):
    """Instance has fewer than two independent rows after preprocessing."""


class NoCircuit(CircuitWalkError):
    """The requested column set is linearly independent."""


class BudgetExceeded(CircuitWalkError):
    """Exhaustive enumeration would exceed the configured budget."""


class ZeroStep(CircuitWalkError):
    """The maximal augmentation has length zero (blocked immediately)."""


class UnboundedDirection(CircuitWalkError):
    """The direction has no negative entry, so no finite maximal step exists."""


class EmptyPolyhedron(CircuitWalkError):
    """The feasible region is empty."""


class UnboundedLP(CircuitWalkError):
    """The objective is unbounded below on the feasible region."""


class NotAVertex(CircuitWalkError):
    """The point is not a vertex: infeasible or dependent support columns."""


class StartInfeasible(CircuitWalkError):
    """The supplied walk start point is not feasible."""


class TargetInvalid(CircuitWalkError):
    """The supplied walk target is not a vertex-with-basis of the instance."""


class NotDualFeasible(CircuitWalkError):
    """The objective admits no dual certificate for the trace's basis."""


class InternalInvariantViolation(CircuitWalkError):
    """A guaranteed runtime invariant failed; indicates a bug, not bad input."""
