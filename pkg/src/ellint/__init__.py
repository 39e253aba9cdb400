"""Numerical verification of elliptic hypergeometric integral identities."""

from .errors import (
    DenominatorZero,
    DomainViolation,
    EllintError,
    Infeasible,
    NoConvergence,
    NodeComputationFailure,
    NonConvergent,
    PoleHit,
    TruncationBudgetExceeded,
    ZeroArgument,
)
from .qseries import Nome, TruncationPolicy, elliptic_gamma, qpochhammer, theta

__version__ = "0.1.0"
