"""Exception hierarchy.

Every error raised deliberately by the library derives from
:class:`ConeMetricError`; the CLI maps those to exit status 1.
"""


class ConeMetricError(ValueError):
    """Base class for all library errors."""


class RootClusteringError(ConeMetricError):
    """Root finding or multiplicity detection produced inconsistent data."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class QuadratureError(ConeMetricError):
    """Adaptive quadrature ran out of budget before reaching tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class PathError(ConeMetricError):
    """A path or loop passes too close to a pole."""


class SingularityError(ConeMetricError):
    """A point is not the kind of singularity an operation expects."""


class ResonanceError(ConeMetricError):
    """A Frobenius recurrence hit a vanishing indicial factor."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class SchemaError(ConeMetricError):
    """Input data does not match the documented JSON layout."""
