"""Exception hierarchy shared by all modules."""


class SkewDryError(Exception):
    """Base class for errors raised by this package."""


class DomainError(SkewDryError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ConvergenceError(SkewDryError, ArithmeticError):
    """A quadrature or refinement loop did not reach its tolerance."""


class EvaluationError(SkewDryError, ArithmeticError):
    """A transform evaluator returned a non-finite value."""


class NumericalInstability(SkewDryError, ArithmeticError):
    """Cancellation or conditioning made a result untrustworthy."""


class ResourceError(SkewDryError, MemoryError):
    """A requested computation exceeds its configured resource cap."""
