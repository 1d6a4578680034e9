"""Exception types shared across the package."""


class FracwaveError(Exception):
    """Base class for package errors."""


class InvalidFieldError(FracwaveError):
    """Field values are non-finite or otherwise unusable."""


class GridMismatchError(FracwaveError):
    """Operands live on different grids."""


class UnsupportedModelError(FracwaveError):
    """Requested model/power combination is not implemented."""


class BifurcationPointError(FracwaveError):
    """Newton Jacobian is singular in the even sector.

    Carries the smallest singular value in ``smallest_singular_value``.
    """

    def __init__(self, message, smallest_singular_value):
        super().__init__(message)
        self.smallest_singular_value = smallest_singular_value


class NormalFormError(FracwaveError):
    """No real normal form exists (c^2 + 4a <= 0)."""


class ReductionError(FracwaveError):
    """RLW -> KdV reduction undefined (c(c+1) <= 0)."""


class SectorError(FracwaveError):
    """Even/odd sector requested for an operator without even potential."""


class ProjectionError(FracwaveError):
    """Mean-zero projection applied twice, or constraint projection failed."""


class ConstraintViolationError(FracwaveError):
    """Minimizer iterate escaped the admissible constraint region."""


class ConfigError(FracwaveError):
    """Configuration file is malformed or fails schema validation."""


class SchemaVersionError(FracwaveError):
    """Persisted artifact has an incompatible schema version."""
