"""q -> 1 verifiers: Selberg-type integrals over the real cube."""

from __future__ import annotations

import math
import time

from ..quadrature import ConvergenceHistory, classical_gamma
from ..sampling import ClassicalParams, IdentityKind, check_admissible
from .core import (
    DEFAULT_SETTINGS,
    IntervalSpec,
    QuadratureSettings,
    compare,
    default_tol,
    integrate_side,
    scaled,
)


def classical_sides(params: ClassicalParams):
    a0, a1, b, n = params.a0, params.a1, params.b, params.n
    al0, al1, tau = params.alpha0, params.alpha1, params.tau
    if params.which == "euler":
        lhs = IntervalSpec(n, a0, a1, al0, al1, b, tau)
        rhs = IntervalSpec(n, a0, a1, al1, al0, b, tau)
        lpre = math.prod(abs(a - x) ** (tau - al) for a, al in ((a0, al0), (a1, al1)) for x in b)
        return lhs, lpre, rhs, 1.0
    lhs = IntervalSpec(n, a0, a1, al0, al1, b, tau)
    rhs = IntervalSpec(n - 1, a0, a1, 2 * tau - al0, 2 * tau - al1, b, tau)
    gam = classical_gamma(al0) * classical_gamma(al1) / classical_gamma(tau)
    powers = abs(a0 - a1) ** (tau - 1) / math.prod(abs(a0 - x) ** al1 * abs(a1 - x) ** al0 for x in b)
    return lhs, 1 / math.factorial(n), rhs, gam * powers / math.factorial(n - 1)


def verify_classical(which, params: ClassicalParams, tol: float | None = None,
                     settings: QuadratureSettings = DEFAULT_SETTINGS):
    """``which`` is IdentityKind.ClassicalEuler (alpha_0 <-> alpha_1 swap, tau = mean)
    or ClassicalContiguous (tau = alpha_0 + alpha_1, n against n - 1 variables)."""
    started = time.perf_counter()
    kind = IdentityKind.parse(which) if isinstance(which, str) else which
    expect = {IdentityKind.ClassicalEuler: "euler", IdentityKind.ClassicalContiguous: "contiguous"}[kind]
    if params.which != expect:
        raise ValueError(f"{kind.name} needs parameters built for {expect!r}")
    check_admissible(params)
    lspec, lpre, rspec, rpre = classical_sides(params)
    lhs = scaled(integrate_side(lspec, settings), lpre)
    rhs = scaled(integrate_side(rspec, settings), rpre)
    tol = default_tol(settings, params.n) if tol is None else tol
    return compare(kind, (params.n, 0, 0), params, tol, started, lhs, rhs)
