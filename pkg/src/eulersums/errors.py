class EulerSumError(Exception):
    pass


class DivergentError(EulerSumError, ValueError):
    """The requested series or constant does not converge."""


class UnsupportedError(EulerSumError, ValueError):
    pass


class ToleranceUnreachable(EulerSumError):
    """Summation could not certify the requested tolerance.

    ``achieved`` holds the best error bound reached, ``value`` the partial result.
    """

    def __init__(self, message: str, achieved=None, value=None, terms: int = 0):
        super().__init__(message)
        self.achieved = achieved
        self.value = value
        self.terms = terms


class ExpansionExhausted(EulerSumError):
    pass
