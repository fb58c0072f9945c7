"""Exception hierarchy.

Domain-type errors (bad input) derive from ``ValueError``; numerical
breakdowns derive from ``ArithmeticError``.  The CLI maps the first family
to exit status 1 and the second to exit status 2.
"""


class BoolentError(Exception):
    """Base class for all package errors."""


class DomainError(BoolentError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidMeasureError(DomainError):
    """A measure violates its representation invariants."""


class NumericalError(BoolentError, ArithmeticError):
    """A numerical routine failed (non-convergence, loss of accuracy)."""


class SingularTransformError(NumericalError):
    """A transform hit a (near) singular value, e.g. a vanishing Cauchy transform."""


class InversionError(NumericalError):
    """Recovering a measure from its Cauchy transform failed."""
