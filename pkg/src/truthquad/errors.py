"""Exception types shared across the package.

The CLI maps these onto exit codes: validation problems exit 2,
numeric-domain failures (degenerate probabilities, survival underflow,
non-finite integrand values) exit 3.
"""


class ValidationError(ValueError):
    """Invalid parameters, mismatched shapes, or malformed configuration."""


class PointBudgetError(ValidationError):
    """A tensor grid would exceed the configured point budget."""


class NumericDomainError(ValueError):
    """A computation left its numeric domain (probability hit 0/1, survival underflowed)."""


class NonFiniteEvaluationError(NumericDomainError):
    """An integrand returned NaN or infinity at a quadrature node."""
