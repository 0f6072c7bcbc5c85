"""Exception hierarchy for stable_eff."""


class StableEffError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(StableEffError, ValueError):
    """An argument is outside its documented domain."""


class NumericalFailureError(StableEffError, ArithmeticError):
    """A quadrature or other numerical routine did not reach its tolerance."""


class DegenerateSampleError(StableEffError, ValueError):
    """Quantile spreads vanish, so the stable parameters are not identifiable."""


class UndefinedExponentError(StableEffError, ValueError):
    """A moment statistic of the Hurst estimator is zero."""


class EstimationGap(StableEffError):
    """Estimation failed at a specific date.

    Carries the originating error so that traces can record the gap
    instead of emitting a silent value.
    """

    def __init__(self, index, date, cause):
        self.index = index
        self.date = date
        self.cause = cause
        super().__init__(f"estimation failed at {date if date is not None else index}: {cause}")
