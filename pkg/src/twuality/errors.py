"""Exception types shared across the package."""


class TwualityError(Exception):
    """Base class for all package errors."""


class ValidationError(TwualityError):
    """Malformed or out-of-contract input."""


class BudgetError(TwualityError):
    """An exhaustive routine was asked to exceed its hard cap."""


class ConsistencyError(TwualityError):
    """An internal re-verification failed; indicates a bug, not bad input."""
