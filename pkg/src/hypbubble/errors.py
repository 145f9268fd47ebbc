"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameters or configuration (CLI exit code 2)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to produce a trustworthy result (exit code 3)."""


class QuadratureError(NumericalError):
    pass


class ShootingError(NumericalError):
    def __init__(self, message, bracket=None):
        super().__init__(message if bracket is None else f"{message} (last bracket {bracket})")
        self.bracket = bracket
