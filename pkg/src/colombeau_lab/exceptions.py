"""Exception types raised across the package."""

from __future__ import annotations


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class ConstructionFailure(RuntimeError):
    """A mollifier could not be built (e.g. an ill-conditioned moment system)."""

    def __init__(self, message: str, condition: float | None = None):
        super().__init__(message)
        self.condition = condition


class TruncationFailure(RuntimeError):
    """A series did not reach its tail tolerance within the hard term limit."""

    def __init__(self, message: str, tail_bound: float, k_used: int):
        super().__init__(message)
        self.tail_bound = tail_bound
        self.k_used = k_used


class DomainError(ValueError):
    """A representative was evaluated outside its declared domain."""


class PreconditionViolation(RuntimeError):
    """A prerequisite test failed; the failing report is attached."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class LatticeMisconfiguration(RuntimeError):
    """The encoded test-object order does not reproduce the known counts."""
