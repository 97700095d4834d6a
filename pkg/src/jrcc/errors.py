"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates a field invariant. ``field`` names the offending input."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class FitError(RuntimeError):
    """A calibration could not produce a trustworthy estimate."""
