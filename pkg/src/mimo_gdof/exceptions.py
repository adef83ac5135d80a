"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter lies outside the domain where a formula is defined."""


class PreconditionError(ValueError):
    """An instance violates a stated precondition of a bound."""


class BudgetExceeded(RuntimeError):
    """A brute-force enumeration would exceed its configured budget."""


class NotCovered(ValueError):
    """The requested construction does not cover these parameters."""


class ValidationFailure(RuntimeError):
    """An achievability plan failed its per-receiver check."""

    def __init__(self, message, validation=None):
        super().__init__(message)
        self.validation = validation
