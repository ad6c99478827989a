"""Exception types shared across the package."""


class ModpError(Exception):
    pass


class ConfigError(ModpError):
    """Invalid or unsupported configuration."""


class PrecisionError(ModpError):
    """The working precision is too small for the requested operation."""


class NonUnitError(ModpError, ArithmeticError):
    pass


class DomainError(ModpError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConstructionError(ModpError):
    """A constructed object failed its own validation."""


class RadiusError(ModpError):
    """A vector or operation exceeds the ball radius of a truncated space."""


class InstabilityError(ModpError):
    """Truncated kernel dimensions changed with the slack parameter."""
