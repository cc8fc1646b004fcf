"""Exception types shared across the toolkit."""


class ValidationError(ValueError):
    """Input data violates a documented contract (bad header, non-monotone time, ...)."""


class ParseError(ValidationError):
    """A file could not be parsed.  Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DivergenceError(RuntimeError):
    """Filter state became non-finite.  Carries the timestep index."""

    def __init__(self, message, step=None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step


class NotAtRestError(ValidationError):
    """A rest prefix was required but the data does not look stationary."""
