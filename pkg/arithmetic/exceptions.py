"""Domain errors shared by the arithmetic and reports apps."""


class KissnumError(ValueError):
    """Base class for every error raised on purpose by this project."""


class UsageError(KissnumError):
    """A precondition of an operation was not met by the caller."""


class UnsupportedError(KissnumError):
    """The operation is not available for this ring (documented limitation)."""


class BudgetExhausted(KissnumError):
    """A bounded search ran out of budget before reaching an answer."""

    def __init__(self, message='', partial=None):
        super().__init__(message)
        # Whatever was computed before the budget ran out
        self.partial = partial


class PellNotFound(BudgetExhausted):
    """No Pell solution with |eps| > 1 inside the searched norm ball."""


class CapExceeded(BudgetExhausted):
    """m(eps_D) is larger than the requested cap."""


class EmptyScan(BudgetExhausted):
    """A scan produced no admissible discriminant."""


class InvariantViolation(KissnumError):
    """An exact identity failed. Indicates a bug or an inconsistent input triple."""
