"""Exception hierarchy shared across the package.

Two branches matter for callers: ``ValidationError`` means the caller handed
us something malformed (CLI exit code 2), ``SolverError`` means a numerical
procedure gave up (CLI exit code 3).
"""


class DexpfamError(Exception):
    """Base class for all package errors."""


class ValidationError(DexpfamError):
    """Caller-side contract violation."""


class EmptySpace(ValidationError):
    pass


class DuplicateLabel(ValidationError):
    pass


class NonPositiveWeight(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class EmptySubset(ValidationError):
    pass


class NonFiniteInput(ValidationError):
    pass


class InvalidOrder(ValidationError):
    pass


class SpaceTooLarge(ValidationError):
    pass


class MixedSizes(ValidationError):
    pass


class CalledOnUniquenessSet(ValidationError):
    pass


class SolverError(DexpfamError):
    """A numerical procedure failed to produce a trustworthy result."""


class NumericalBreakdown(SolverError):
    pass


class SolverDivergence(SolverError):
    pass


class BudgetExceeded(SolverError):
    pass
