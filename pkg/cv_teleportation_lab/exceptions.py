"""Errors raised by the lab."""


class LabError(Exception):
    """Base class for every error raised by the lab."""


class InvalidArgumentError(LabError, ValueError):
    """An argument is outside the domain of the operation."""


class InvalidStateError(LabError, ValueError):
    """A covariance matrix violates the uncertainty relation or a determinant bound."""


class UnsupportedStateError(LabError, ValueError):
    """A valid state the operation is not defined for (mixed two-mode states)."""


class YSingularError(LabError, ValueError):
    """The Bell interaction yields a singular detection matrix Y."""
