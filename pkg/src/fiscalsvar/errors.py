"""Exception types shared across the package."""


class FiscalSvarError(Exception):
    """Base class for all package-specific errors."""


class UnitError(FiscalSvarError):
    """Series has the wrong unit tag for an operation."""


class AlignmentError(FiscalSvarError):
    """Two series do not share the same start quarter and length."""


class DomainError(FiscalSvarError):
    """A value is outside the mathematically admissible domain (e.g. CPI <= 0)."""


class InsufficientDataError(FiscalSvarError):
    """Too few observations for the requested operation."""


class SchemaError(FiscalSvarError):
    """A required CSV column is missing or the schema map is malformed."""


class QuarterGapError(FiscalSvarError):
    """Quarterly index is not contiguous (gap or duplicate)."""


class CsvParseError(FiscalSvarError):
    """A CSV cell could not be parsed (bad date or non-numeric value)."""


class WindowCoverageError(FiscalSvarError):
    """Requested analysis window extends beyond the loaded data."""


class SampleSizeError(FiscalSvarError):
    """Not enough effective observations to fit the regression."""


class RankError(FiscalSvarError):
    """Regressor matrix is rank deficient (perfect collinearity)."""


class DofError(FiscalSvarError):
    """No degrees of freedom left for the residual covariance."""


class DecompositionError(FiscalSvarError):
    """Cholesky factorization failed: matrix not positive definite.

    ``pivot`` is the 1-based index of the failing pivot.
    """

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class DegenerateDenominatorError(FiscalSvarError):
    """Cumulative spending response too close to zero to form a ratio.

    ``horizon`` is the first offending multiplier horizon (1-based).
    """

    def __init__(self, message, horizon=None):
        super().__init__(message)
        self.horizon = horizon


class ShapeError(FiscalSvarError):
    """Array arguments have inconsistent shapes."""


class UnstableDgpError(FiscalSvarError):
    """Synthetic-data generator parameters imply an explosive process."""


class InferenceError(FiscalSvarError):
    """Too many bootstrap replications failed to produce usable bands."""


class ConfigError(FiscalSvarError):
    """Run configuration is malformed (unknown key, bad value, no countries)."""
