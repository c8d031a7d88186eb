"""Exception hierarchy shared by all modules.

The CLI maps :class:`ValidationError` to exit status 2 and
:class:`ContractViolation` to exit status 3.
"""


class TransDiracError(Exception):
    """Base class for package errors."""


class ValidationError(TransDiracError, ValueError):
    """Input data failed a precondition (shape, range, unknown key...)."""


class ContractViolation(TransDiracError, ArithmeticError):
    """A computed quantity broke an invariant it is guaranteed to satisfy.

    ``residual`` names the failing invariant so callers can report it.
    """

    def __init__(self, message, residual=None, value=None):
        super().__init__(message)
        self.residual = residual
        self.value = value
