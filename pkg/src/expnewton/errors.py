"""Exception hierarchy.

Two families matter to callers: ``ValidationError`` (bad inputs, caught by the
CLI as exit code 2) and ``NumericalFailure`` (the numerics gave up, exit 3).
"""


class ExpNewtonError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(ExpNewtonError, ValueError):
    pass


class NumericalFailure(ExpNewtonError, ArithmeticError):
    pass


# core model
class OutOfRange(ValidationError):
    pass


class OutOfRadius(ValidationError):
    pass


class AxisSingularity(ValidationError):
    pass


class CriticalSlope(ValidationError):
    pass


# picard
class BadEpsilon(ValidationError):
    pass


class InnerOverflow(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    pass


# radial solver / integrator
class BadConfig(ValidationError):
    pass


class StepUnderflow(NumericalFailure):
    pass


class NoEvent(ValidationError):
    pass


# phase portrait
class ChartSingularity(ValidationError):
    pass


class NotEquilibrium(ValidationError):
    pass


class StartIsEquilibrium(ValidationError):
    pass


class AtCenter(ValidationError):
    pass


class BudgetExhausted(NumericalFailure):
    pass


# resistance
class DomainNotCovered(ValidationError):
    pass


class BadParams(ValidationError):
    pass
