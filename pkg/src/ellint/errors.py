"""Exception hierarchy shared by every ellint module."""


class EllintError(Exception):
    """Base class for all library errors."""


class NonConvergent(EllintError, ValueError):
    """A nome has modulus >= 1, so the infinite products diverge."""


class TruncationBudgetExceeded(EllintError):
    """The tail bound could not be met within ``max_terms`` factors."""


class ZeroArgument(EllintError, ValueError):
    """A function was evaluated at 0, which lies outside its domain."""


class PoleHit(EllintError, ArithmeticError):
    """A denominator factor came within the pole threshold of zero."""


class DenominatorZero(PoleHit):
    """A q-Pochhammer or theta denominator vanished."""


class DomainViolation(EllintError, ValueError):
    """A point or parameter lies outside the domain of a real-interval weight."""


class NodeComputationFailure(EllintError):
    """Gauss-Jacobi nodes could not be produced inside the interval."""


class NoConvergence(EllintError):
    """Grid refinement stopped before the target accuracy was reached.

    The partial :class:`~ellint.quadrature.ConvergenceHistory` is attached
    as ``history``.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history


class Infeasible(EllintError):
    """Parameter sampling failed to meet the constraints of an identity."""

    def __init__(self, message, failures=None):
        super().__init__(message)
        self.failures = dict(failures or {})
