"""Exception hierarchy shared by the solver modules."""


class PencilError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PencilError, ValueError):
    pass


class GridMismatchError(PencilError, ValueError):
    pass


class IntegrationError(PencilError, ArithmeticError):
    """An initial value problem blew up; ``node`` is the first bad grid index."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NotPositiveError(PencilError):
    """The operator A is not positive (no positive solution of l(y)=0 found)."""


class SearchError(PencilError):
    pass


class NotAnEigenvalueError(PencilError):
    pass


class ValidationError(PencilError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ReconstructionError(PencilError):
    pass


class ConventionError(ReconstructionError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class QuantizationError(PencilError):
    def __init__(self, message, n=None, residual=None):
        super().__init__(message)
        self.n = n
        self.residual = residual


class InconsistentAngleError(PencilError):
    pass


class SingularCommutationError(PencilError):
    pass
