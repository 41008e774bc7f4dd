"""Exception types shared across the toolkit."""


class LapctrlError(Exception):
    """Base class for all toolkit errors."""


class GraphFormatError(LapctrlError):
    """Malformed graph input. Carries the offending line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DisconnectedGraphError(LapctrlError):
    """Operation requires a connected graph."""


class NotBalancedError(LapctrlError):
    """Operation requires a structurally balanced graph."""


class NotATreeError(LapctrlError):
    """Operation requires a directed spanning tree rooted at the leader."""


class UnreachableTargetError(LapctrlError):
    """Steering target lies outside the controllable subspace."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class BudgetExceededError(LapctrlError):
    """A combinatorial search exceeded its configured budget."""


class EigendecompositionError(LapctrlError):
    """Eigensolver failed or the matrix is too far from diagonalizable."""
