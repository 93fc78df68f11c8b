"""
Exceptions raised by the routing engine.

Every error carries the process exit code the CLI uses for it.
"""


class EVRouteError(Exception):
    """Base class for all routing engine errors"""
    exit_code = 1


class InvalidParameter(EVRouteError):
    """A preference pair, capacity, charge model or similar input is invalid"""
    exit_code = 2


class UnknownVertex(InvalidParameter):
    """Vertex id outside the graph"""


class GraphError(EVRouteError):
    """A graph violates its structural invariants"""
    exit_code = 2


class WeightOverflow(EVRouteError):
    """A weight component left the 64-bit integer range"""
    exit_code = 2


class ParseError(EVRouteError):
    """Malformed input file"""
    exit_code = 2

    def __init__(self, message: str, line_number: int = None, source: str = None):
        self.line_number = line_number
        self.source = source
        location = source or '<input>'
        if line_number is not None:
            location = f"{location}:{line_number}"
        super().__init__(f"{location}: {message}")


class UnknownClass(ParseError):
    """Road class code outside 1..4"""


class NonPositiveLength(ParseError):
    """Segment length is zero or negative"""


class RoundGuardExceeded(EVRouteError):
    """Label relaxation did not reach a fixpoint within the round bound"""
    exit_code = 4


class ExplosionGuard(EVRouteError):
    """Exhaustive path enumeration exceeded its node budget"""
    exit_code = 4


class GuardExceeded(EVRouteError):
    """Instance too large for the exact oracle"""
    exit_code = 4


class NegativeScalarCycle(EVRouteError):
    """A cycle with negative scalarized cost is reachable"""
    exit_code = 5


class Unreachable(EVRouteError):
    """Vertex is not reached by a shortest-path tree"""
    exit_code = 3


class NoFeasibleRoute(EVRouteError):
    """No route satisfies the query goal"""
    exit_code = 3
