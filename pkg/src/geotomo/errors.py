"""Exception hierarchy shared across the package."""


class GeotomoError(Exception):
    """Base class for all errors raised by geotomo."""


class DegenerateInputError(GeotomoError, ValueError):
    pass


class SpecError(GeotomoError, ValueError):
    """Invalid body specification (bad axis lengths, non-convex profile, ...)."""


class EmptySectionError(GeotomoError):
    """The cutting plane is tangent to or misses the body."""


class NotInteriorError(GeotomoError, ValueError):
    pass


class IterationAborted(GeotomoError):
    """Reflection iteration could not continue; ``trace`` holds the steps so far."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace
