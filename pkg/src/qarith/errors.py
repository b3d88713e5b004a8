"""Exception hierarchy shared by every builder and the CLI."""


class QArithError(Exception):
    """Base class for all library errors."""


class StructuralError(QArithError, ValueError):
    """Malformed circuit, gate, or register wiring (bad indices, overlaps, width mismatches)."""


class DomainError(QArithError, ValueError):
    """A classical parameter lies outside the range an operation supports."""


class CapacityError(QArithError):
    """The request does not fit: too many qubits, or a register too narrow for the construction."""


class ExhaustionError(QArithError):
    """A randomized procedure ran out of attempts; ``trace`` holds what was tried."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace
