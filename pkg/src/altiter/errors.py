"""Exception hierarchy shared by the package."""


class AltIterError(Exception):
    """Base class for all package errors."""


class DomainError(AltIterError, ValueError):
    """A point is not a valid element of the space or of its convex domain."""


class ParameterError(AltIterError, ValueError):
    """An argument is outside its admissible range or mismatches the space."""


class ScheduleExhausted(ParameterError):
    """An explicit lambda schedule is shorter than the requested horizon."""
