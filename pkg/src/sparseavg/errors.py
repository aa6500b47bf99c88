"""Shared exception types, mapped to CLI exit codes in sparseavg.cli."""


class ParameterError(ValueError):
    """A numeric argument is outside its allowed range."""


class DimensionError(ParameterError):
    """Unsupported dimension for the requested operation."""


class UnsupportedOrderError(ParameterError):
    """Bessel order outside the supported half-integer set."""


class SingularOrderError(ParameterError):
    """Bochner-Riesz order at or below the logarithmic singularity at -1."""


class InvalidPointError(ValueError):
    """A raw point violates the space's defining constraints."""


class SpaceMismatchError(TypeError):
    """Observable evaluated on a point from a different space."""


class CapacityError(RuntimeError):
    """An enumeration would exceed its configured size cap."""


class FitRefusedError(RuntimeError):
    """Decay fit refused: too few usable points or values at noise floor."""


class ConfigError(ValueError):
    """Experiment configuration failed validation."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

    def report(self):
        return {"error": "invalid-config", "field": self.field, "message": str(self)}
