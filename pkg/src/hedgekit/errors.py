"""Exception types shared across the toolkit."""


class HedgekitError(Exception):
    """Base class for all toolkit errors."""


class SpaceError(HedgekitError):
    """Label/dimension bookkeeping violation (unknown label, collision, ...)."""


class ValidationError(HedgekitError):
    """An input object violates a construction invariant."""


class DomainError(HedgekitError):
    """The request is well-formed but outside the operation's domain
    (non-diagonal game for a classical reduction, failed threshold
    condition, infeasible input witness, ...)."""


class NumericalError(HedgekitError):
    """A numerical kernel failed (eigensolver non-convergence, solver
    breakdown)."""
