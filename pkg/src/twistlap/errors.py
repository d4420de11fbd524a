"""Exception and warning types shared across the package."""


class InvalidInputError(ValueError):
    """An argument is outside the documented domain (non-finite, wrong shape, ...)."""


class ConfigError(ValueError):
    """A configuration value violates a documented constraint."""


class ResourceLimitError(RuntimeError):
    """An operation would exceed a configured resource cap; raised before allocation."""


class TruncationKeyError(KeyError):
    """A spectral coefficient refers to an index outside the basis truncation."""


class FitError(ValueError):
    """Not enough usable data points for a regression fit."""


class TruncationWarning(UserWarning):
    """Grid or index truncation is visibly losing mass."""
