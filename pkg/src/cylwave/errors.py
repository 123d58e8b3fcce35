"""Exception hierarchy shared by all modules."""


class CylwaveError(Exception):
    """Base class for every error raised by the package."""


class DomainError(CylwaveError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(CylwaveError, ValueError):
    """Inconsistent or empty configuration (cutoffs, dyadic ranges, shapes)."""


class ShapeError(ConfigurationError):
    pass


class RegimeMismatchError(DomainError):
    """Parameters fall outside the regime in which a bound is stated."""


class NumericalResolutionError(CylwaveError, RuntimeError):
    """A discretisation is too coarse for the requested accuracy."""


class TruncationError(NumericalResolutionError):
    pass


class UnderResolvedError(NumericalResolutionError):
    pass


class StepSizeError(NumericalResolutionError):
    pass


class NoContractionError(NumericalResolutionError):
    pass


class ResolutionWarning(UserWarning):
    """Emitted when a diagnostic is computed below grid resolution."""
