"""Exception hierarchy. Every error is also a ``ValueError``."""


class InvstatError(ValueError):
    """Base class for all invstat errors."""


class InvalidOrderError(InvstatError):
    """Matrix order is not a positive integer."""


class ShapeError(InvstatError):
    """Operands have mismatched orders or malformed shapes."""


class DomainError(InvstatError):
    """Input lies outside the domain of the operation (non-SPD, singular, ...)."""


class ArityError(InvstatError):
    """Wrong number of tangent directions."""


class NumericalBreakdown(InvstatError):
    """A finite-difference stencil left the SPD cone even after step halving."""


class StepTooLargeError(NumericalBreakdown):
    pass
