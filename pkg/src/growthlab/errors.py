"""Exception hierarchy shared by all growthlab modules."""


class GrowthLabError(Exception):
    pass


class DomainError(GrowthLabError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PreconditionError(GrowthLabError, ValueError):
    """Arguments are individually valid but violate a stated precondition."""


class ResourceError(GrowthLabError):
    """An exhaustive enumeration was asked to exceed its size bound."""


class AccuracyError(GrowthLabError, ArithmeticError):
    """A numerical method could not certify its target accuracy.

    ``achieved`` holds the best error estimate that was obtained.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ConditioningError(AccuracyError):
    pass


class InstabilityError(AccuracyError):
    pass
