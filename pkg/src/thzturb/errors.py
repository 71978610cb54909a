"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class TableRangeError(DomainError):
    """A lookup fell outside the span of a tabulated quantity."""

    def __init__(self, value, low, high, what="frequency"):
        self.value = value
        self.low = low
        self.high = high
        super().__init__(
            f"{what} {value!r} outside table range [{low!r}, {high!r}]"
        )


class NumericalError(ArithmeticError):
    """A numerical procedure failed to converge or produced non-finite values.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (achieved tolerance, order index, offending parameter, ...).
    """

    def __init__(self, message, **diagnostics):
        self.diagnostics = diagnostics
        if diagnostics:
            detail = ", ".join(f"{k}={v!r}" for k, v in diagnostics.items())
            message = f"{message} ({detail})"
        super().__init__(message)


class SingularPointError(NumericalError):
    """The attenuation formula hit its log-of-zero singularity."""
