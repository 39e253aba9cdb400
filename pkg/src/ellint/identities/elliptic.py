"""Elliptic verifiers: Dixon, Selberg and the main transformation."""

from __future__ import annotations

import cmath
import itertools
import time
from dataclasses import replace

from ..kernels import KernelKind, constants
from ..qseries import elliptic_gamma, gamma_product, stable_prod
from ..sampling import (
    DixonParams,
    EllipticParams,
    IdentityKind,
    SelbergParams,
    check_admissible,
)
from .core import (
    DEFAULT_SETTINGS,
    IntegrandSpec,
    SideResult,
    QuadratureSettings,
    compare,
    default_tol,
    gammas,
    gen_prod,
    integrate_side,
    scaled,
)
from ..quadrature import ConvergenceHistory


def _pairs(xs):
    return [a * b for a, b in itertools.combinations(xs, 2)]


def _closed(value) -> SideResult:
    return SideResult(complex(value), ConvergenceHistory.exact(value))


# -- Dixon ------------------------------------------------------------------


def dixon_sides(params: DixonParams, sqrt_sign: int = 1):
    """(lhs spec, lhs prefactor, rhs spec, rhs prefactor)."""
    nome, n, m = params.nome, params.n, params.m
    lhs = IntegrandSpec(KernelKind.DeltaI, n, nome, None, tuple(gammas(*params.t_r)))
    s = sqrt_sign * cmath.sqrt(nome.pq)
    rhs = IntegrandSpec(KernelKind.DeltaI, m, nome, None, tuple(gammas(*(s / x for x in params.t_r))))
    lpre = constants("BC", n, nome)
    rpre = constants("BC", m, nome) * gamma_product(_pairs(params.t_r), nome.p, nome.q)
    return lhs, lpre, rhs, rpre


def verify_dixon(params: DixonParams, tol: float | None = None,
                 settings: QuadratureSettings = DEFAULT_SETTINGS, sqrt_sign: int = 1):
    """n-dimensional DeltaI integral with 2n+2m+4 parameters against its m-dimensional image.

    For m = 0 the right side is the closed-form product prod_{r<s} Gamma(t_r t_s).
    ``sqrt_sign`` picks the branch of sqrt(pq) in the reflected parameters.
    """
    started = time.perf_counter()
    check_admissible(params)
    lspec, lpre, rspec, rpre = dixon_sides(params, sqrt_sign)
    lhs = scaled(integrate_side(lspec, settings), lpre)
    rhs = scaled(integrate_side(rspec, settings), rpre)
    kind = IdentityKind.DixonEval if params.m == 0 else IdentityKind.DixonTransform
    tol = default_tol(settings, params.n, params.m) if tol is None else tol
    return compare(kind, (params.n, params.m, 0), params, tol, started, lhs, rhs,
                   {"sqrt_sign": sqrt_sign})


# -- Selberg ----------------------------------------------------------------


def selberg_lhs_spec(params: SelbergParams) -> tuple:
    nome, n, t = params.nome, params.n, params.t
    spec = IntegrandSpec(KernelKind.DeltaII, n, nome, t, tuple(gammas(*params.t_r)))
    pre = constants("BC", n, nome) * elliptic_gamma(t, nome.p, nome.q) ** n
    return spec, pre


def selberg_eval_rhs(params: SelbergParams) -> complex:
    """prod_{j=1}^n Gamma(t^j) prod_{i<n} prod_{r<s} Gamma(t^i t_r t_s).

    The first product is needed for the left side's Gamma(t)^n normalization;
    at n = 1 it is what makes the statement the elliptic beta integral.
    """
    nome, n, t = params.nome, params.n, params.t
    args = [t**j for j in range(1, n + 1)]
    args += [t**i * x for i in range(n) for x in _pairs(params.t_r)]
    return gamma_product(args, nome.p, nome.q)


def selberg_transform_params(params: SelbergParams) -> SelbergParams:
    """(t_1..t_8) -> (v t_1..v t_4, t_5/v..t_8/v); applying it twice is the identity."""
    v = params.v
    new = [v * x for x in params.t_r[:4]] + [x / v for x in params.t_r[4:]]
    return replace(params, t_r=new)


def selberg_transform_prefactor(params: SelbergParams) -> complex:
    """prod_{i<n} prod_{1<=r<s<=4} Gamma(t^i t_r t_s) Gamma(t^i t_{r+4} t_{s+4})."""
    nome, n, t = params.nome, params.n, params.t
    tr = params.t_r
    args = [t**i * x for i in range(n) for x in _pairs(tr[:4]) + _pairs(tr[4:])]
    return gamma_product(args, nome.p, nome.q)


def selberg_transform_prefactor_cross(params: SelbergParams) -> complex:
    """prod_{i<n} prod_{r<=4<s} Gamma(t^i t_r t_s); kept to document that it fails."""
    nome, n, t = params.nome, params.n, params.t
    tr = params.t_r
    args = [t**i * a * b for i in range(n) for a in tr[:4] for b in tr[4:]]
    return gamma_product(args, nome.p, nome.q)


def verify_selberg(kind, params: SelbergParams, tol: float | None = None,
                   settings: QuadratureSettings = DEFAULT_SETTINGS):
    """``kind`` is IdentityKind.SelbergEval (6 parameters) or SelbergTransform (8)."""
    started = time.perf_counter()
    kind = IdentityKind.parse(kind) if isinstance(kind, str) else kind
    expected = {IdentityKind.SelbergEval: 6, IdentityKind.SelbergTransform: 8}[kind]
    if len(params.t_r) != expected:
        raise ValueError(f"{kind.name} needs {expected} parameters")
    check_admissible(params)
    spec, pre = selberg_lhs_spec(params)
    lhs = scaled(integrate_side(spec, settings), pre)
    if kind is IdentityKind.SelbergEval:
        rhs = _closed(selberg_eval_rhs(params))
    else:
        rspec, rpre = selberg_lhs_spec(selberg_transform_params(params))
        rhs = scaled(integrate_side(rspec, settings), rpre * selberg_transform_prefactor(params))
    tol = default_tol(settings, params.n) if tol is None else tol
    return compare(kind, (params.n, 0, 0), params, tol, started, lhs, rhs)


# -- main transformation ------------------------------------------------------


def main_sides(params: EllipticParams):
    nome, n, m, t = params.nome, params.n, params.m, params.t
    p, q = nome.p, nome.q
    g_t = elliptic_gamma(t, p, q)
    lhs = IntegrandSpec(KernelKind.DeltaII, n, nome, t, tuple(gammas(*params.t_r, *params.v_r)))
    lpre = constants("BC", n, nome) * g_t**n
    rhs = IntegrandSpec(KernelKind.DeltaII, m, nome, t,
                        tuple(gammas(*(t / x for x in params.t_r), *params.v_r)))
    tt = _pairs(params.t_r)
    front = gen_prod(lambda i: gamma_product([x * t ** (n - i) for x in tt], p, q), m + 1, n)
    cross = gamma_product([a * v for v in params.v_r for a in params.t_r], p, q)
    rpre = stable_prod([front, cross, constants("BC", m, nome), g_t**m])
    return lhs, lpre, rhs, rpre


def verify_main(params: EllipticParams, tol: float | None = None,
                settings: QuadratureSettings = DEFAULT_SETTINGS):
    """n-dimensional against m-dimensional elliptic Selberg integral, t_r -> t/t_r.

    The prefactor product over i = m+1..n is read as 1/prod_{i=n+1}^{m} when m > n.
    """
    started = time.perf_counter()
    check_admissible(params)
    lspec, lpre, rspec, rpre = main_sides(params)
    lhs = scaled(integrate_side(lspec, settings), lpre)
    rhs = scaled(integrate_side(rspec, settings), rpre)
    tol = default_tol(settings, params.n, params.m) if tol is None else tol
    return compare(IdentityKind.MainTheorem, (params.n, params.m, params.k), params, tol, started, lhs, rhs)


def main_as_selberg(params: EllipticParams) -> SelbergParams:
    """The (n, m) = (1, 0) instance as six-parameter Selberg data (same integrand)."""
    if (params.n, params.m) != (1, 0):
        raise ValueError("only the (1, 0) instance is a Selberg evaluation")
    return SelbergParams(params.nome, params.t, list(params.t_r) + list(params.v_r), 1)
