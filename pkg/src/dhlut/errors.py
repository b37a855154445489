"""Exception types raised across the toolkit."""


class DhlutError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameter(DhlutError, ValueError):
    pass


class OutOfRange(DhlutError, ValueError):
    pass


class InvalidInput(DhlutError, ValueError):
    pass


class DegenerateDenominator(DhlutError, ArithmeticError):
    """A normalizing sum is zero, so the requested ratio is undefined."""


class ConfigError(DhlutError, ValueError):
    """Bad experiment configuration. ``field`` names the offending key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class IoError(DhlutError, OSError):
    pass
