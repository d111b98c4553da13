"""Exception types raised by the solver."""


class ValidationError(ValueError):
    """Bad user input. ``field`` names the offending argument."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class DomainError(ValueError):
    """Evaluation requested outside the range a solution was built for."""


class NumericalError(RuntimeError):
    """A root bracket or null-space extraction broke down."""
