"""Exception types shared across the package."""


class SforError(Exception):
    """Base class for all package errors."""


class ValidationError(SforError, ValueError):
    """Bad input: invalid parameters, malformed config, misaligned grids."""


class DomainError(ValidationError):
    """Argument outside the domain of a function (e.g. a pole of Gamma)."""


class NumericalError(SforError, ArithmeticError):
    """A computation could not deliver a trustworthy result."""


class MLAccuracyError(NumericalError):
    """Mittag-Leffler evaluation missed its tolerance.

    ``achieved`` holds the best relative error estimate that was reached.
    """

    def __init__(self, message, achieved=float("nan")):
        super().__init__(message)
        self.achieved = achieved


class NotSPDError(NumericalError):
    """A tridiagonal solve hit a nonpositive pivot."""


class StepError(NumericalError):
    """Time stepping failed at a given level."""

    def __init__(self, message, level):
        super().__init__(f"level {level}: {message}")
        self.level = level
