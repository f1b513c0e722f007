"""Exception hierarchy shared by every module."""


class BVSquaresError(Exception):
    """Base class for all library errors."""


class ConfigurationError(BVSquaresError, ValueError):
    """A parameter is outside the range the library accepts."""


class RangeError(BVSquaresError, IndexError):
    """A query reaches beyond the precomputed prime table."""


class DomainError(BVSquaresError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class BudgetError(ConfigurationError):
    """An enumeration would exceed its desk-scale budget."""


class ChainError(BVSquaresError, AssertionError):
    """The conductor divisibility chain failed; signals a bug upstream."""
