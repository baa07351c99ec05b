"""Exception types shared across the package."""


class Blowup1dError(Exception):
    """Base class for all package errors."""


class GridError(Blowup1dError):
    """Invalid grid parameters (odd N, non-positive length, ...)."""


class ShapeError(Blowup1dError):
    """Sample array length does not match the grid."""


class UnknownPresetError(Blowup1dError):
    """Requested initial-data preset does not exist."""


class InvalidDataError(Blowup1dError):
    """Initial data violates the admissibility (sign/symmetry) conditions."""


class DomainError(Blowup1dError):
    """Evaluation point or grid range outside the admissible domain."""


class SingularPointError(Blowup1dError):
    """Kernel evaluated exactly at its singular point."""


class ParameterError(Blowup1dError):
    """Scalar parameter outside its admissible range."""


class QuadratureSingularError(Blowup1dError):
    """Non-integrable singularity in a requested quadrature."""


class NormalizationError(Blowup1dError):
    """Field normalization (theta(0) = 0, unit mass, ...) violated."""


class SignError(Blowup1dError):
    """A quantity required to be non-negative is significantly negative."""


class DegenerateError(Blowup1dError):
    """Degenerate input (zero mass, empty support)."""


class UnreliableEstimateError(Blowup1dError):
    """Extrapolation input too short or non-monotone."""


class TruncationError(Blowup1dError):
    """Compact support required but the data reaches the grid boundary."""


class ConfigError(Blowup1dError):
    """Invalid or incomplete run configuration."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key
