"""Integration kernels, weights and normalization constants.

Every torus kernel has the form

    K(z) = prod_i single(z_i) * prod_{i<j} pair(z_i, z_j),

which is how the quadrature module contracts them cheaply.  The +-
shorthand ``f(a z^{+-1})`` = ``f(a z) f(a/z)`` is expanded in one place,
:func:`pm_arguments`.
"""

from __future__ import annotations

import enum
import itertools
import math

import numpy as np

from .errors import DenominatorZero, DomainViolation
from .qseries import (
    DEFAULT_POLICY,
    POLE_THRESHOLD,
    Nome,
    elliptic_gamma,
    qpochhammer,
    theta,
)


class KernelKind(enum.Enum):
    DeltaI = "DeltaI"
    DeltaII = "DeltaII"
    TildeDeltaII = "TildeDeltaII"
    TildeDeltaIII = "TildeDeltaIII"
    TildeDeltaAII = "TildeDeltaAII"
    ClassicalSelbergWeight = "ClassicalSelbergWeight"


TILDE_KINDS = (KernelKind.TildeDeltaII, KernelKind.TildeDeltaIII, KernelKind.TildeDeltaAII)


def pm_arguments(coeff, *zs):
    """All products ``coeff * z_1^{s_1} ... z_k^{s_k}`` for s in {+1,-1}^k.

    The sign vectors are stacked on a new trailing axis of length 2**k, in
    lexicographic order with +1 first.
    """
    zs = [np.asarray(z, dtype=complex) for z in zs]
    terms = []
    for signs in itertools.product((1, -1), repeat=len(zs)):
        term = np.asarray(coeff, dtype=complex)
        for z, s in zip(zs, signs):
            term = term * (z if s == 1 else 1.0 / z)
        terms.append(term)
    return np.stack(np.broadcast_arrays(*terms), axis=-1)


def gamma_pm(coeff, *zs, nome: Nome, policy=DEFAULT_POLICY):
    """prod over signs of Gamma(coeff z_1^{+-1} ... z_k^{+-1}; p, q)."""
    args = pm_arguments(coeff, *zs)
    return np.prod(elliptic_gamma(args, nome.p, nome.q, policy), axis=-1)


def qpoch_pm(coeff, *zs, q, policy=DEFAULT_POLICY):
    """prod over signs of (coeff z_1^{+-1} ... z_k^{+-1}; q)."""
    args = pm_arguments(coeff, *zs)
    return np.prod(qpochhammer(args, q, policy), axis=-1)


def _inv_gamma_reflected(x, nome, policy):
    # 1/(Gamma(x) Gamma(1/x)) = theta(x;p) theta(1/x;q): entire on C*, and
    # vanishes (instead of hitting a pole) at x = 1.
    return theta(x, nome.p, policy) * theta(1.0 / x, nome.q, policy)


def _checked_den(den, what):
    if np.any(np.abs(den) < POLE_THRESHOLD):
        raise DenominatorZero(f"{what} denominator vanishes")
    return den


# -- factor definitions -----------------------------------------------------


def single_factor(kind: KernelKind, t, z, nome: Nome, policy=DEFAULT_POLICY):
    """The univariate factor of ``kind`` at each entry of z."""
    z = np.asarray(z, dtype=complex)
    if kind in (KernelKind.DeltaI, KernelKind.DeltaII):
        return _inv_gamma_reflected(z * z, nome, policy)
    q = nome.q
    if kind is KernelKind.TildeDeltaII:
        return qpoch_pm(1.0, z * z, q=q, policy=policy)
    if kind is KernelKind.TildeDeltaIII:
        return 1.0 - z * z
    if kind is KernelKind.TildeDeltaAII:
        return np.ones_like(z)
    raise ValueError(f"{kind} is not a torus kernel")


def pair_factor(kind: KernelKind, t, zi, zj, nome: Nome, policy=DEFAULT_POLICY):
    """The cross factor of ``kind`` for each broadcast pair (zi, zj)."""
    zi = np.asarray(zi, dtype=complex)
    zj = np.asarray(zj, dtype=complex)
    if kind in (KernelKind.DeltaI, KernelKind.DeltaII):
        out = _inv_gamma_reflected(zi * zj, nome, policy) * _inv_gamma_reflected(
            zi / zj, nome, policy
        )
        if kind is KernelKind.DeltaII:
            out = out * gamma_pm(t, zi, zj, nome=nome, policy=policy)
        return out
    q = nome.q
    if kind is KernelKind.TildeDeltaII:
        den = _checked_den(qpoch_pm(t, zi, zj, q=q, policy=policy), "TildeDeltaII")
        return qpoch_pm(1.0, zi, zj, q=q, policy=policy) / den
    if kind is KernelKind.TildeDeltaIII:
        num = qpochhammer(np.stack(np.broadcast_arrays(q * zi * zj / t, zi / zj, zj / zi), -1), q, policy)
        den = qpochhammer(np.stack(np.broadcast_arrays(t * zi * zj, t * zi / zj, t * zj / zi), -1), q, policy)
        den = _checked_den(np.prod(den, axis=-1), "TildeDeltaIII")
        return np.prod(num, axis=-1) / den * (1.0 - zi * zj)
    if kind is KernelKind.TildeDeltaAII:
        num = qpochhammer(np.stack(np.broadcast_arrays(zi / zj, zj / zi), -1), q, policy)
        den = qpochhammer(np.stack(np.broadcast_arrays(t * zi / zj, t * zj / zi), -1), q, policy)
        den = _checked_den(np.prod(den, axis=-1), "TildeDeltaAII")
        return np.prod(num, axis=-1) / den
    raise ValueError(f"{kind} is not a torus kernel")


def evaluate_kernel(kind: KernelKind, t, z, nome: Nome, policy=DEFAULT_POLICY):
    """Kernel value at points z of shape (..., n)."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    out = np.ones(z.shape[:-1], dtype=complex)
    for i in range(n):
        out = out * single_factor(kind, t, z[..., i], nome, policy)
    for i in range(n):
        for j in range(i + 1, n):
            out = out * pair_factor(kind, t, z[..., i], z[..., j], nome, policy)
    return out


# -- public kernels ---------------------------------------------------------


def delta_I(z, nome: Nome, policy=DEFAULT_POLICY):
    """1 / (prod_{i<j} Gamma(z_i^{+-1} z_j^{+-1}) prod_i Gamma(z_i^{+-2}))."""
    return evaluate_kernel(KernelKind.DeltaI, None, z, nome, policy)


def delta_II(t, z, nome: Nome, policy=DEFAULT_POLICY):
    """delta_I(z) * prod_{i<j} Gamma(t z_i^{+-1} z_j^{+-1})."""
    return evaluate_kernel(KernelKind.DeltaII, complex(t), z, nome, policy)


def tilde_kernels(kind: KernelKind, t, z, q, policy=DEFAULT_POLICY):
    """The p-free kernels TildeDeltaII, TildeDeltaIII and TildeDeltaAII.

    TildeDeltaIII carries the factor prod_{i<=j} (1 - z_i z_j), diagonal
    terms (1 - z_i^2) included.
    """
    if kind not in TILDE_KINDS:
        raise ValueError(f"{kind} is not a basic hypergeometric kernel")
    return evaluate_kernel(kind, complex(t), z, Nome(0.0, q), policy)


def constants(group: str, n: int, nome: Nome, elliptic: bool = True, policy=DEFAULT_POLICY):
    """P_{BC_n} = (p;p)^n (q;q)^n / (2^n n!),  P_{A_{n-1}} = (p;p)^n (q;q)^n / n!.

    With ``elliptic=False`` the (p;p) factor is dropped (the tilde constants).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    group = group.upper()
    if group not in ("BC", "A"):
        raise ValueError(f"unknown group {group!r}")
    val = qpochhammer(nome.q, nome.q, policy) ** n
    if elliptic:
        val = val * qpochhammer(nome.p, nome.p, policy) ** n
    denom = math.factorial(n) * (2**n if group == "BC" else 1)
    return complex(val) / denom


def classical_weight(x, a, b, alpha, tau, exclude_endpoint_singularity=False):
    """Selberg-type weight on the real cube (a_0, a_1)^n.

        prod_{i<j} |x_i - x_j|^{2 tau}
        * prod_i |x_i - a_0|^{alpha_0 - 1} |x_i - a_1|^{alpha_1 - 1} / prod_r |x_i - b_r|^tau

    Powers use positive real bases, so complex exponents need no branch
    choice.  With ``exclude_endpoint_singularity`` the endpoint factors are
    omitted (a Gauss-Jacobi rule carries them).
    """
    x = np.asarray(x, dtype=float)
    a0, a1 = float(a[0]), float(a[1])
    b = np.asarray(b, dtype=float).reshape(-1)
    if np.any(x <= a0) or np.any(x >= a1):
        raise DomainViolation(f"points outside ({a0}, {a1})")
    if np.any((b >= a0) & (b <= a1)):
        raise DomainViolation(f"b parameters inside [{a0}, {a1}]")
    alpha0, alpha1 = complex(alpha[0]), complex(alpha[1])
    tau = complex(tau)
    n = x.shape[-1]
    out = np.ones(x.shape[:-1], dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            out = out * np.abs(x[..., i] - x[..., j]) ** (2 * tau)
    for i in range(n):
        xi = x[..., i]
        if not exclude_endpoint_singularity:
            out = out * (xi - a0) ** (alpha0 - 1) * (a1 - xi) ** (alpha1 - 1)
        for br in b:
            out = out / np.abs(xi - br) ** tau
    return out
