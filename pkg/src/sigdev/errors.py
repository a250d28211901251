"""Exception hierarchy shared by all sigdev modules."""


class SigdevError(Exception):
    """Base class for errors raised by this package."""


class DomainError(SigdevError, ValueError):
    """Invalid input: bad arguments, mismatched dimensions, malformed data."""


class NumericError(SigdevError, ArithmeticError):
    """A numeric procedure failed (e.g. a covariance factorization)."""


class ResourceLimitError(SigdevError, RuntimeError):
    """A request exceeds a configured combinatorial or memory bound."""
