"""Exception types shared across the package."""


class InvalidParameter(ValueError):
    """An argument violates a documented precondition."""


class UndefinedLeadingTerm(ValueError):
    """The zero polynomial has no leading term."""


class NotInSpan(ArithmeticError):
    """A target vector is not in the span of the given basis."""


class TheoremViolation(AssertionError):
    """A computed invariant disagrees with the claimed theorem.

    These are findings, not crashes: the CLI turns them into exit code 2.
    """

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


class UnstableSample(RuntimeError):
    """A sampled rank changed when the sample count was doubled."""


class EmptyFiber(ValueError):
    """The Richardson variety is empty (v is not below w)."""


class GridParseError(InvalidParameter):
    """Malformed tableau grid text."""
