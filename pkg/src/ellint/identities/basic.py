"""p -> 0 verifiers: the three q-beta transformations, the theta-sum lemma
and the gamma-to-q-Pochhammer limits."""

from __future__ import annotations

import itertools
import time

import numpy as np

from ..errors import DenominatorZero
from ..kernels import KernelKind, constants
from ..qseries import (
    POLE_THRESHOLD,
    Nome,
    elliptic_gamma,
    elliptic_gamma_shifted,
    qpoch_product,
    qpochhammer,
    stable_prod,
    theta,
    theta_product,
)
from ..quadrature import ConvergenceHistory, rel_diff
from ..sampling import (
    BHParams1,
    BHParams2,
    EllipticParams,
    GammaLimitParams,
    IdentityKind,
    LemmaParams,
    check_admissible,
    to_flat,
)
from .core import (
    DEFAULT_SETTINGS,
    IntegrandSpec,
    QuadratureSettings,
    SideResult,
    VerificationReport,
    compare,
    default_tol,
    gen_prod,
    integrate_side,
    qpoch,
    qpoch_pm,
    scaled,
    theta_f,
)


def _ratio(num, den, q) -> complex:
    d = qpoch_product(den, q)
    if abs(d) < POLE_THRESHOLD:
        raise DenominatorZero("prefactor denominator vanishes")
    return qpoch_product(num, q) / d


def _tilde_const(group, n, q, t) -> complex:
    return constants(group, n, Nome(0.0, q), elliptic=False) / complex(qpochhammer(t, q)) ** n


# -- BC-symmetric q-beta transformation -------------------------------------


def _bh1_factors(tr, v, t):
    out = []
    for x in tr:
        out += qpoch_pm(x, power=-1)
    for x in v:
        out += qpoch_pm(t * x) + qpoch_pm(x, power=-1)
    return tuple(out)


def bh1_sides(params: BHParams1):
    q, t, n, m = params.q, params.t, params.n, params.m
    nome = Nome(0.0, q)
    lhs = IntegrandSpec(KernelKind.TildeDeltaII, n, nome, t, _bh1_factors(params.t_r, params.v_r, t))
    rhs = IntegrandSpec(KernelKind.TildeDeltaII, m, nome, t,
                        _bh1_factors([t / x for x in params.t_r], params.v_r, t))
    tt = [a * b for a, b in itertools.combinations(params.t_r, 2)]
    front = gen_prod(lambda i: 1.0 / qpoch_product([x * t ** (n - i) for x in tt], q), m + 1, n)
    cross = _ratio([t * v / x for v in params.v_r for x in params.t_r],
                   [x * v for v in params.v_r for x in params.t_r], q)
    rpre = stable_prod([front, cross, _tilde_const("BC", m, q, t)])
    return lhs, _tilde_const("BC", n, q, t), rhs, rpre


# -- second and third corollaries: symmetry broken ----------------------------


def _bh23_factors(params: BHParams2, right: bool):
    q, t = params.q, params.t
    a0, a1 = (params.t0, params.t1) if right else (params.s0, params.s1)
    b0, b1 = (params.s0, params.s1) if right else (params.t0, params.t1)
    th = (params.w2, params.w3) if right else (params.u2, params.u3)
    out = []
    if params.which == 2:
        # (q a z;q) / ((z/a;q) (t b z^{+-};q)), a the outer pair, b the inner
        for a in (a0, a1):
            out += [qpoch(q * a), qpoch(1 / a, power=-1)]
        for b in (b0, b1):
            out += qpoch_pm(t * b, power=-1)
        for v in params.v_r:
            out += [qpoch(v * t), qpoch(q / v), qpoch(v, power=-1), qpoch(q / (t * v), power=-1)]
    else:
        for a in (a0, a1):
            out.append(qpoch(1 / a, power=-1))
        for b in (b0, b1):
            out.append(qpoch(t * b, sign=-1, power=-1))
        for v in params.v_r:
            out += [qpoch(v * t), qpoch(v, power=-1)]
    out += [theta_f(th[0]), theta_f(th[1])]
    return tuple(out)


def bh23_sides(params: BHParams2):
    q, t, n, m = params.q, params.t, params.n, params.m
    nome = Nome(0.0, q)
    kind = KernelKind.TildeDeltaIII if params.which == 2 else KernelKind.TildeDeltaAII
    lhs = IntegrandSpec(kind, n, nome, t, _bh23_factors(params, right=False))
    rhs = IntegrandSpec(kind, m, nome, t, _bh23_factors(params, right=True))
    t0, t1, s0, s1 = params.t0, params.t1, params.s0, params.s1
    th_num = theta_product([t**i * t0 * x for i in range(1, n + 1) for x in (params.u2, params.u3)], q)
    th_den = theta_product([t**i * x * s0 for i in range(1, m + 1) for x in (params.w2, params.w3)], q)

    def front(i):
        val = 1.0 / qpoch_product([tj * t ** (1 + n - i) / sk for tj in (t0, t1) for sk in (s0, s1)], q)
        if params.which == 2:
            val *= _ratio([q * t ** (i - n) * s0 * s1], [t0 * t1 * t ** (2 + n - i)], q)
        return val

    if params.which == 2:
        vr = _ratio([x for v in params.v_r for x in (q * s0 / v, t * v * s0, q * s1 / v, v * t * s1)],
                    [x for v in params.v_r for x in (t0 * t * v, q * t0 / v, t1 * t * v, q * t1 / v)], q)
    else:
        vr = _ratio([x for v in params.v_r for x in (t * v * s0, v * t * s1)],
                    [x for v in params.v_r for x in (t0 * t * v, t1 * t * v)], q)
    if abs(th_den) < POLE_THRESHOLD:
        raise DenominatorZero("theta prefactor denominator vanishes")
    rpre = stable_prod([th_num / th_den, gen_prod(front, m + 1, n), vr, _tilde_const("A", m, q, t)])
    return lhs, _tilde_const("A", n, q, t), rhs, rpre


def verify_bh(which: int, params, tol: float | None = None,
              settings: QuadratureSettings = DEFAULT_SETTINGS):
    """which = 1: BC-symmetric q-beta transformation (k <= n + m v's);
    which = 2, 3: the symmetry-broken forms with TildeDeltaIII / TildeDeltaAII kernels."""
    started = time.perf_counter()
    check_admissible(params)
    if which == 1:
        if not isinstance(params, BHParams1):
            raise TypeError("which=1 needs BHParams1")
        lspec, lpre, rspec, rpre = bh1_sides(params)
        kind = IdentityKind.BH1
    elif which in (2, 3):
        if not isinstance(params, BHParams2) or params.which != which:
            raise TypeError(f"which={which} needs BHParams2 with matching ``which``")
        lspec, lpre, rspec, rpre = bh23_sides(params)
        kind = IdentityKind.BH2 if which == 2 else IdentityKind.BH3
    else:
        raise ValueError("which must be 1, 2 or 3")
    lhs = scaled(integrate_side(lspec, settings), lpre)
    rhs = scaled(integrate_side(rspec, settings), rpre)
    tol = default_tol(settings, params.n, params.m) if tol is None else tol
    return compare(kind, (params.n, params.m, params.k), params, tol, started, lhs, rhs)


def elliptic_lift(params: BHParams1, p: complex) -> EllipticParams:
    """Main-theorem parameters at nome p whose p -> 0 limit is ``params`` (k = n + m)."""
    if params.k != params.n + params.m:
        raise ValueError("the elliptic lift needs k = n + m")
    nome = Nome(p, params.q)
    v = []
    for x in params.v_r:
        v += [x, nome.pq / (params.t * x)]
    return EllipticParams(nome, params.t, params.t_r, v, params.n, params.m)


def bh1_limit_probe(params: BHParams1, p_values=(1e-2, 1e-3, 1e-4),
                    settings: QuadratureSettings = DEFAULT_SETTINGS) -> list:
    """Relative gaps |elliptic LHS(p) - basic LHS| / |basic LHS| for each p."""
    from .elliptic import main_sides

    lspec, lpre, _, _ = bh1_sides(params)
    basic = lpre * integrate_side(lspec, settings).value
    out = []
    for p in p_values:
        espec, epre, _, _ = main_sides(elliptic_lift(params, p))
        val = epre * integrate_side(espec, settings).value
        out.append((p, val, abs(val - basic) / abs(basic)))
    return out


# -- theta-sum lemma ----------------------------------------------------------


def lemma_terms(params: LemmaParams) -> np.ndarray:
    """The 2^n summands, one per sign vector (lexicographic, +1 first)."""
    p, t = params.p, params.t
    z = np.asarray(params.z, dtype=complex)
    n = z.size
    out = []
    for sigma in itertools.product((1, -1), repeat=n):
        zs = z ** np.asarray(sigma)
        num, den = [], []
        for i in range(n):
            for j in range(i + 1, n):
                num.append(t * zs[i] * zs[j])
                den.append(zs[i] * zs[j])
        for i in range(n):
            num += [u * zs[i] for u in params.u]
            den.append(zs[i] ** 2)
        d = theta_product(den, p)
        if abs(d) < POLE_THRESHOLD:
            raise DenominatorZero(f"theta denominator vanishes for signs {sigma}")
        out.append(theta_product(num, p) / d)
    return np.asarray(out)


def lemma_sum(params: LemmaParams) -> complex:
    """Direct evaluation of the 2^n-term sum over sign vectors."""
    return complex(np.sum(lemma_terms(params)))


def lemma_products(params: LemmaParams) -> tuple:
    """Both closed forms: with (u0u1, u0u2, u0u3) and with (u0u1, u0u2, u1u2)."""
    p, t = params.p, params.t
    u0, u1, u2, u3 = params.u
    n = params.n
    first = theta_product([t**i * x for i in range(n) for x in (u0 * u1, u0 * u2, u0 * u3)], p)
    second = theta_product([t**i * x for i in range(n) for x in (u0 * u1, u0 * u2, u1 * u2)], p)
    return first, second


def verify_lemma_sym(n: int, params: LemmaParams, tol: float = 1e-10) -> VerificationReport:
    """The finite theta sum against both product forms; no quadrature involved.

    ``passed`` needs the sum to match the first product and the two products
    to match each other, each below ``tol``.
    """
    started = time.perf_counter()
    if params.n != n:
        raise ValueError(f"params carry {params.n} variables, expected {n}")
    check_admissible(params)
    lhs = lemma_sum(params)
    first, second = lemma_products(params)
    forms = rel_diff(first, second)
    rep = compare(IdentityKind.LemmaSym, (n, 0, 0), params, tol, started,
                  SideResult(lhs, ConvergenceHistory.exact(lhs)),
                  SideResult(first, ConvergenceHistory.exact(first)),
                  {"rhs_alt": second, "forms_rel_err": forms})
    rep.passed = rep.passed and forms < tol
    return rep


# -- gamma limits -------------------------------------------------------------


def verify_gamma_limits(probe_p: float, params: GammaLimitParams, tol: float | None = None,
                        slack: float = 2.0) -> VerificationReport:
    """Gamma(z;p,q) -> 1/(z;q) and Gamma(pz;p,q) -> (q/z;q) as p -> 0.

    For probe_p > 0 both gaps must be first order: gap(p) <= slack * C * p with
    C = gap(10 p) / (10 p).  At probe_p = 0 both gaps must vanish exactly.
    ``tol`` is unused for p > 0; at p = 0 it bounds both relative gaps
    (default 1e-14: the two truncated products agree up to rounding).
    """
    started = time.perf_counter()
    check_admissible(params)
    if not 0 <= probe_p < 0.1:
        raise ValueError("probe_p must lie in [0, 0.1)")
    z, q = params.z, params.q
    lim1 = 1.0 / complex(qpochhammer(z, q))
    lim2 = complex(qpochhammer(q / z, q))

    def gaps(p):
        g1 = complex(elliptic_gamma(z, p, q))
        g2 = complex(elliptic_gamma_shifted(z, p, q))
        return g1, g2, abs(g1 - lim1), abs(g2 - lim2)

    g1, g2, d1, d2 = gaps(probe_p)
    extra = {"shifted_value": g2, "shifted_limit": lim2, "gap": d1, "shifted_gap": d2}
    if probe_p == 0:
        tol = 1e-14 if tol is None else tol
        ok = d1 <= tol * abs(lim1) and d2 <= tol * abs(lim2)
    else:
        _, _, D1, D2 = gaps(10 * probe_p)
        C1, C2 = D1 / (10 * probe_p), D2 / (10 * probe_p)
        ok = d1 <= slack * C1 * probe_p and d2 <= slack * C2 * probe_p
        extra.update(C=C1, C_shifted=C2)
        tol = float("inf") if tol is None else tol
    rep = compare(IdentityKind.GammaLimitP0, (0, 0, 0), params, float("inf"), started,
                  SideResult(g1, ConvergenceHistory.exact(g1)),
                  SideResult(lim1, ConvergenceHistory.exact(lim1)), extra)
    rep.tol = tol
    rep.passed = bool(ok)
    return rep
