"""Exception types raised by the library."""


class QBoxError(Exception):
    """Base class for library errors."""


class DomainError(QBoxError, ValueError):
    """An argument lies outside the domain of the operation."""


class QOverflowError(QBoxError, OverflowError):
    """A q-factorial or related quantity exceeds the float range."""


class SeriesTruncationError(QBoxError, ArithmeticError):
    """A series hit its term cap before the truncation rule was met.

    ``partial`` holds the partial sum reached at the cap.
    """

    def __init__(self, message, partial=None, terms_used=None):
        super().__init__(message)
        self.partial = partial
        self.terms_used = terms_used


class ConvergenceError(QBoxError, ArithmeticError):
    """An iterative procedure (root bracketing, lattice sum) did not converge."""


class GammaQuadratureError(ConvergenceError):
    """The ordinary integral defining the q-gamma constant could not be closed."""
