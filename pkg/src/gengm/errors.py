"""Exception hierarchy shared by all gengm modules."""


class GengmError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(GengmError):
    """Input violates a documented precondition (shape, finiteness, range)."""


class NumericError(GengmError):
    """A numerical routine failed (singular matrix, non-convergence)."""


class SingularGradientError(NumericError):
    """Structural penalty gradient is singular: exponent below one with a
    vanishing structural term."""


class HypothesisError(InvalidInputError):
    """A model hypothesis required by the error-bound machinery fails.

    The message names the violated clause.
    """


class ValidityError(InvalidInputError):
    """Regularization parameters fall outside the admissible region."""


class CapacityError(GengmError):
    """Problem size exceeds what an exact (brute-force) routine supports."""
