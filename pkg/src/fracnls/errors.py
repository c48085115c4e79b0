"""Exception hierarchy shared by all modules."""


class FracNLSError(Exception):
    """Base class for every error raised by the package."""


class GridMismatch(FracNLSError, ValueError):
    pass


class InvalidExponent(FracNLSError, ValueError):
    pass


class InvalidOrder(FracNLSError, ValueError):
    pass


class DomainError(FracNLSError, ValueError):
    pass


class InvalidSpec(FracNLSError, ValueError):
    """A problem description violates one of its invariants."""


class NotLocalized(FracNLSError):
    pass


class NumericalOverflow(FracNLSError, ArithmeticError):
    def __init__(self, term, message=None):
        self.term = term
        super().__init__(message or f"non-finite value in term '{term}'")


class UnsupportedClass(FracNLSError):
    pass


class InvalidShift(FracNLSError, ValueError):
    pass


class NoNehariIntersection(FracNLSError):
    pass


class NoFeasibleStart(FracNLSError):
    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)


class NotConverged(FracNLSError):
    """Iteration cap reached; ``report`` carries the partial state."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotOnManifold(FracNLSError):
    pass


class Inconclusive(FracNLSError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class UnstableStep(FracNLSError):
    def __init__(self, message, suggested_dt):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class ConfigError(FracNLSError, ValueError):
    pass
