"""Exception hierarchy.

The CLI maps these onto exit codes: ``ConfigError`` -> 2, ``DomainError`` -> 3,
``NumericError`` -> 4.
"""


class GraphonError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(GraphonError):
    """Malformed graphon file, run configuration or CLI arguments."""


class DomainError(GraphonError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class PreconditionError(DomainError):
    """A modelling assumption required by the computation does not hold."""


class NumericError(GraphonError, ArithmeticError):
    """An iterative or direct numerical method failed to meet its tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
