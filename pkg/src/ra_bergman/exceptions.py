"""Exception hierarchy shared by every module."""


class RaBergmanError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(RaBergmanError, ValueError):
    pass


class InvalidInputError(RaBergmanError, ValueError):
    pass


class DomainError(RaBergmanError, ValueError):
    """A point lies outside the domain of a map."""


class EvaluationError(RaBergmanError):
    """An evaluator failed at a specific sample.

    The failing sample index is kept in ``index``.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NumericalOverflowError(RaBergmanError, OverflowError):
    """A value left float range; a log-magnitude path is usually available."""


class GeneratorOverflowError(NumericalOverflowError):
    """Generator magnitude exceeds float range; use the log-magnitude evaluator."""


class NotAMemberError(RaBergmanError):
    """Negative Fourier mass above tolerance: no holomorphic extension."""

    def __init__(self, message, mass=None):
        super().__init__(message)
        self.mass = mass


class OutOfDiscError(RaBergmanError, ValueError):
    pass


class DegenerateInputError(RaBergmanError, ValueError):
    pass


class NumericalBreakdownError(RaBergmanError):
    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class ConstructionFailureError(RaBergmanError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SearchFailureError(RaBergmanError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class InvalidCurveError(RaBergmanError, ValueError):
    pass
