"""Exception types shared across the toolkit."""


class SDWCError(Exception):
    """Base class for toolkit errors."""


class ValidationError(SDWCError, ValueError):
    """Malformed input: bad shapes, unnormalized tables, unknown axes."""


class DomainError(SDWCError, ValueError):
    """A scalar argument lies outside the domain of the function."""


class SizeError(SDWCError):
    """An enumeration or table would exceed the configured size cap."""


class SingularityError(SDWCError, ArithmeticError):
    """A Gaussian conditional covariance is singular.

    ``term`` names the offending entropy or variance.
    """

    def __init__(self, term, message=None):
        self.term = term
        super().__init__(message or f"singular conditional covariance in {term}")
