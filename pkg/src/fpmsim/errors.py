"""Exception types shared across the toolkit."""


class FpmError(Exception):
    """Base class for all fpmsim errors."""


class FieldError(FpmError, ValueError):
    """Invalid complex field or spectrum (shape, finiteness, bounds)."""


class GeometryError(FpmError, ValueError):
    """Illumination-grid geometry violates a bound (pupil out of spectrum, bad overlap target, ...)."""


class CubeFormatError(FpmError, ValueError):
    """Malformed .fpc cube file (bad magic, version, truncation, checksum)."""


class NumericalError(FpmError, ArithmeticError):
    """Non-finite values appeared mid-computation."""
