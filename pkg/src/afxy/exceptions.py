"""Custom exceptions for afxy"""


class AfxyError(Exception):
    """Base class of all errors raised by afxy."""


class UndefinedSiteError(AfxyError, KeyError):
    """Exception raised when a lattice site required by a computation has no phase."""

    def __str__(self):
        return Exception.__str__(self)


class PreconditionError(AfxyError):
    """Exception raised when the input of an operation violates its precondition."""


class MonodromyError(PreconditionError):
    """Exception raised by the lifting if the phase does not close up around a cycle.

    This happens exactly when the lifted region encloses a nonzero degree.
    """

    def __init__(self, message: str, winding: int = 0):
        super().__init__(message)
        self.winding = winding


class ExtensionError(AfxyError):
    """Exception raised when an extended field fails its jump certificate."""


class UnderSamplingError(AfxyError):
    """Exception raised when a sampled loop has an ambiguous angular gap."""


class InvariantViolationError(AfxyError):
    """Exception raised when a checked invariant does not hold."""
