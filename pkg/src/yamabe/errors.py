"""Exception types raised across the package."""


class YamabeError(ValueError):
    """Base class for invalid input to any yamabe routine."""


class DimensionError(YamabeError):
    """A dimension is below what the formula needs (usually m < 3)."""


class BudgetExceeded(YamabeError):
    """A discretization would exceed the configured vertex budget."""


class SpecError(YamabeError):
    """A manifold document failed to parse or validate.

    ``path`` names the offending field, e.g. ``masses[3]``.
    """

    def __init__(self, message, path=None):
        self.path = path
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class AssumptionViolated(YamabeError):
    """The curvature hypothesis of the product lower bound fails."""
