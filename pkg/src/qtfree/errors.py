"""Exception types.  Everything derives from :class:`QTFError`."""


class QTFError(Exception):
    """Base class for toolkit errors."""


class InvalidInput(QTFError, ValueError):
    """Malformed input data (bad JSON shape, bad group spec, ...)."""


class DisconnectedGraph(InvalidInput):
    def __init__(self, vertex):
        super().__init__(f"vertex {vertex} is unreachable from the basepoint")
        self.vertex = vertex


class InvalidEdge(InvalidInput):
    def __init__(self, edge, reason):
        super().__init__(f"invalid edge {tuple(edge)}: {reason}")
        self.edge = tuple(edge)


class InvalidBasepoint(InvalidInput):
    def __init__(self, basepoint, n):
        super().__init__(f"basepoint {basepoint} not in range(0, {n})")
        self.basepoint = basepoint


class NotAGroup(InvalidInput):
    def __init__(self, axiom, witness=None):
        super().__init__(f"table is not a group: {axiom} fails" + (f" at {witness}" if witness is not None else ""))
        self.axiom = axiom
        self.witness = witness


class BallTooLarge(QTFError):
    def __init__(self, size, cap):
        super().__init__(f"ball exceeds size cap ({size} > {cap})")
        self.size = size
        self.cap = cap


class NotTreeMetric(QTFError):
    def __init__(self, defect):
        super().__init__(f"four-point defect {defect} > 0; not a tree metric")
        self.defect = defect


class NotAutomorphism(QTFError):
    pass


class OrbitEscapesBall(QTFError):
    """An action was applied to a vector whose image leaves the materialized ball."""


class NotReducedWord(InvalidInput):
    pass


# Internal-consistency failures: these indicate a bug, never bad input.


class PseudoMetricViolation(QTFError, AssertionError):
    pass


class UpperBoundViolation(QTFError, AssertionError):
    pass


class BoundViolation(QTFError, AssertionError):
    pass


class NotInSubgroup(QTFError, AssertionError):
    pass


class SolverFailure(QTFError, RuntimeError):
    pass
