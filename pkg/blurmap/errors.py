"""Exceptions raised by blurmap."""


class BlurmapError(Exception):
    """Base class for all blurmap errors."""


class ImageReadError(BlurmapError, OSError):
    """A raster could not be read or written."""


class ImageFormatError(BlurmapError, ValueError):
    """Unsupported or malformed raster data."""


class MapRangeError(BlurmapError, ValueError):
    """Map values outside the range an output format can hold."""


class ContractViolation(BlurmapError, ValueError):
    """Inputs break an operation's preconditions (shapes, NaN, parameters)."""


class ConfigError(BlurmapError, ValueError):
    """Invalid configuration file, environment value or flag."""
