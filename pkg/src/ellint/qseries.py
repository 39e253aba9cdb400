"""q-Pochhammer symbols, theta functions and the elliptic gamma function.

All functions accept scalars or numpy arrays and broadcast elementwise.
Infinite products are truncated from geometric tail bounds: the neglected
part of the log-product is certified to be at most
``policy.abs_tail_bound`` in absolute value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NonConvergent,
    PoleHit,
    TruncationBudgetExceeded,
    ZeroArgument,
)

# A denominator factor 1 - w with |1 - w| below this is treated as a pole.
POLE_THRESHOLD = 1e-10

# Upper bound on (array entries) x (factors) materialized at once.
_CHUNK_BUDGET = 1 << 21


@dataclass(frozen=True)
class TruncationPolicy:
    abs_tail_bound: float = 1e-15
    max_terms: int = 10**6

    def __post_init__(self):
        if not self.abs_tail_bound > 0:
            raise ValueError("abs_tail_bound must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class Nome:
    """The pair of nomes (p, q); both must lie strictly inside the unit disk."""

    p: complex
    q: complex

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))
        object.__setattr__(self, "q", complex(self.q))
        _check_nome(self.p, "p")
        _check_nome(self.q, "q")

    @property
    def pq(self) -> complex:
        return self.p * self.q

    def conjugate(self) -> "Nome":
        return Nome(self.p.conjugate(), self.q.conjugate())


def _check_nome(x, name="q"):
    if not abs(x) < 1:
        raise NonConvergent(f"|{name}| = {abs(x)!r} is not < 1")


def _as_complex(x):
    arr = np.asarray(x, dtype=complex)
    return arr


def _finish(arr, scalar):
    if scalar:
        return complex(np.asarray(arr).reshape(()))
    return arr


def stable_prod(values) -> complex:
    """Product of complex numbers with a separately tracked binary exponent.

    Long prefactor products (dozens of gamma values) can drift far outside
    the double range before coming back; the mantissa is renormalized after
    every factor so only the final result can overflow.
    """
    mant = 1.0 + 0.0j
    exp = 0
    for v in np.ravel(np.asarray(values, dtype=complex)):
        mant *= complex(v)
        mag = abs(mant)
        if mag == 0.0:
            return 0j
        if not math.isfinite(mag):
            raise OverflowError("non-finite factor in product")
        _, e = math.frexp(mag)
        mant = complex(math.ldexp(mant.real, -e), math.ldexp(mant.imag, -e))
        exp += e
    return complex(math.ldexp(mant.real, exp), math.ldexp(mant.imag, exp))


# -- q-Pochhammer and theta -------------------------------------------------


def _qpoch_length(xmax, b, policy):
    """Number of factors R with 2*xmax*b**R/(1-b) <= bound and xmax*b**R < 1/2."""
    if xmax == 0.0 or b == 0.0:
        return 1
    target = policy.abs_tail_bound * (1.0 - b) / (2.0 * xmax)
    r1 = math.log(target) / math.log(b) if target < 1 else 0.0
    r2 = math.log(0.5 / xmax) / math.log(b) if xmax >= 0.5 else 0.0
    R = max(1, int(math.floor(max(r1, r2))) + 1)
    if R > policy.max_terms:
        raise TruncationBudgetExceeded(
            f"(x;q) needs {R} factors for |x|={xmax:.3g}, |q|={b:.3g}"
        )
    return R


def _product_over(x, w):
    """prod_k (1 - x * w[k]) for every entry of x, chunked over x."""
    flat = x.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    step = max(1, _CHUNK_BUDGET // max(1, w.size))
    for i in range(0, flat.size, step):
        out[i:i + step] = np.prod(1.0 - flat[i:i + step, None] * w[None, :], axis=1)
    return out.reshape(x.shape)


def qpochhammer(x, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """(x;q) = prod_{r>=0} (1 - x q^r)."""
    q = complex(q)
    _check_nome(q)
    scalar = np.ndim(x) == 0
    x = _as_complex(x)
    if q == 0:
        return _finish(1.0 - x, scalar)
    xmax = float(np.max(np.abs(x))) if x.size else 0.0
    if xmax == 0.0:
        return _finish(np.ones_like(x), scalar)
    R = _qpoch_length(xmax, abs(q), policy)
    w = q ** np.arange(R)
    return _finish(_product_over(x, w), scalar)


def qpochhammer_multi(xs, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """(x_1, ..., x_k; q): product of q-Pochhammer symbols over the last axis."""
    return np.prod(qpochhammer(np.asarray(xs, dtype=complex), q, policy), axis=-1)


def theta(x, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """theta(x;q) = (x;q)(q/x;q)."""
    q = complex(q)
    _check_nome(q)
    scalar = np.ndim(x) == 0
    x = _as_complex(x)
    if np.any(x == 0):
        raise ZeroArgument("theta(x;q) is undefined at x = 0")
    out = qpochhammer(x, q, policy) * qpochhammer(q / x, q, policy)
    return _finish(out, scalar)


# -- elliptic gamma ---------------------------------------------------------


def _lattice(p, q, scale, policy):
    """Points p^r q^s of the truncated (r, s) lattice.

    Keeps (r, s) with |p|^r |q|^s >= delta, where delta is shrunk until
    2 * scale * sum_{excluded} |p|^r |q|^s <= abs_tail_bound; ``scale`` is
    the sum of the largest coefficient moduli multiplying the lattice.
    """
    a, b = abs(p), abs(q)
    if a == 0 and b == 0:
        return np.array([1.0 + 0.0j])
    if a < b:
        # enumerate rows along the smaller modulus; fewer rows
        return _lattice(q, p, scale, policy)
    la = math.log(a)
    lb = math.log(b) if b > 0 else -math.inf
    delta = policy.abs_tail_bound * (1 - a) * (1 - b) / (8.0 * max(scale, 1e-300))
    for _ in range(200):
        # rows r with b^r >= delta, columns s with a^s b^r >= delta
        R0 = int(math.floor(math.log(delta) / lb)) + 1 if b > 0 else 1
        R0 = max(R0, 1)
        counts = []
        tail = 0.0
        for r in range(R0):
            br = b ** r
            if br < delta:
                counts.append(0)
                tail += br / (1 - a)
                continue
            s_r = int(math.floor(math.log(delta / br) / la)) + 1
            s_r = max(s_r, 1)
            counts.append(s_r)
            tail += br * a ** s_r / (1 - a)
        tail += (b ** R0) / ((1 - a) * (1 - b)) if b > 0 else 0.0
        bound = 2.0 * scale * tail
        total = sum(counts)
        if total > policy.max_terms:
            raise TruncationBudgetExceeded(
                f"elliptic gamma lattice needs {total} factors (|p|={a:.3g}, |q|={b:.3g})"
            )
        if bound <= policy.abs_tail_bound and scale * delta < 0.5:
            break
        delta *= min(0.5, policy.abs_tail_bound / bound) if bound > 0 else 0.5
    else:  # pragma: no cover - loop always terminates for |p|,|q| < 1
        raise TruncationBudgetExceeded("could not certify lattice truncation")
    pw = p ** np.arange(max(counts))
    pts = [q ** r * pw[:c] for r, c in enumerate(counts) if c]
    return np.concatenate(pts)


def _lattice_ratio(num, den, p, q, policy):
    """prod_{r,s} (1 - num p^r q^s) / (1 - den p^r q^s), elementwise."""
    scale = float(np.max(np.abs(num), initial=0.0) + np.max(np.abs(den), initial=0.0))
    w = _lattice(p, q, scale, policy)
    flat_n = num.reshape(-1)
    flat_d = den.reshape(-1)
    out = np.empty(flat_n.shape, dtype=complex)
    step = max(1, _CHUNK_BUDGET // w.size)
    for i in range(0, flat_n.size, step):
        d = 1.0 - flat_d[i:i + step, None] * w[None, :]
        if np.any(np.abs(d) < POLE_THRESHOLD):
            j = np.argwhere(np.abs(d) < POLE_THRESHOLD)[0]
            raise PoleHit(
                f"elliptic gamma denominator vanishes at argument {flat_d[i + j[0]]!r}"
            )
        n = 1.0 - flat_n[i:i + step, None] * w[None, :]
        out[i:i + step] = np.prod(n / d, axis=1)
    return out.reshape(num.shape)


def elliptic_gamma(z, p, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """Gamma(z;p,q) = prod_{r,s>=0} (1 - p^{r+1} q^{s+1}/z) / (1 - p^r q^s z).

    At p = 0 this is exactly 1/(z;q), and symmetrically at q = 0.
    Raises PoleHit when a denominator factor is within POLE_THRESHOLD of 0.
    """
    p, q = complex(p), complex(q)
    _check_nome(p, "p")
    _check_nome(q, "q")
    scalar = np.ndim(z) == 0
    z = _as_complex(z)
    if np.any(z == 0):
        raise ZeroArgument("elliptic gamma is undefined at z = 0")
    out = _lattice_ratio(p * q / z, z, p, q, policy)
    return _finish(out, scalar)


def elliptic_gamma_shifted(z, p, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """Gamma(pz;p,q), evaluated from its own product representation.

    Equals theta(z;q) Gamma(z;p,q) wherever the right side is finite, but
    stays finite on the lattice z = p^{-r} q^{-s} where that product is
    0 * inf. At p = 0 it is exactly (q/z;q).
    """
    p, q = complex(p), complex(q)
    _check_nome(p, "p")
    _check_nome(q, "q")
    scalar = np.ndim(z) == 0
    z = _as_complex(z)
    if np.any(z == 0):
        raise ZeroArgument("elliptic gamma is undefined at z = 0")
    # Gamma(pz) = prod (1 - p^r q^{s+1}/z) / (1 - p^{r+1} q^s z)
    out = _lattice_ratio(q / z, p * z, p, q, policy)
    return _finish(out, scalar)


def gamma_product(args, p, q, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """prod_k Gamma(args[k];p,q), accumulated with exponent tracking."""
    vals = elliptic_gamma(np.asarray(args, dtype=complex).ravel(), p, q, policy)
    return stable_prod(vals)


def qpoch_product(args, q, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """prod_k (args[k];q), accumulated with exponent tracking."""
    vals = qpochhammer(np.asarray(args, dtype=complex).ravel(), q, policy)
    return stable_prod(vals)


def theta_product(args, q, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """prod_k theta(args[k];q), accumulated with exponent tracking."""
    vals = theta(np.asarray(args, dtype=complex).ravel(), q, policy)
    return stable_prod(vals)
