"""Exception hierarchy shared by every module."""


class SafezoneError(Exception):
    """Base class for all package errors."""


class ValidationError(SafezoneError, ValueError):
    """An input violates a documented precondition or invariant."""


class DegenerateInputError(ValidationError):
    pass


class PreconditionError(ValidationError):
    """A geometric routine was called on a configuration it does not handle."""


class AlignmentError(ValidationError):
    """Two trajectories cannot be compared on a common time grid."""


class TrajectoryFormatError(ValidationError):
    """A trajectory file is malformed (too short, unordered, NaN cells...)."""


class UnreachedGoalError(SafezoneError):
    """The trajectory never enters the goal radius."""
