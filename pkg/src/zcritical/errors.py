"""Exception types shared across the package."""


class ZCriticalError(Exception):
    """Base class for all package errors."""


class DegreeMismatch(ZCriticalError, ValueError):
    pass


class ZeroCharge(ZCriticalError, ValueError):
    """Central charge evaluates to zero, so its phase is undefined."""


class NotPositive(ZCriticalError, ValueError):
    """A metric failed the pointwise positivity gate."""

    def __init__(self, message, points=()):
        super().__init__(message)
        self.points = list(points)


class NoHamiltonianAction(ZCriticalError):
    pass


class NonConvergence(ZCriticalError, RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class PhaseCollapse(ZCriticalError, RuntimeError):
    pass


class ConfigError(ZCriticalError, ValueError):
    pass
