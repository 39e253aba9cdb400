"""Admissible, exactly balanced parameter sets for each identity.

Free moduli are drawn log-uniformly inside the admissible annuli (shrunk by
a relative ``margin``), phases uniformly; every parameter fixed by a
balancing condition is solved from it by division, never sampled.  The RNG
is numpy's PCG64 (``numpy.random.default_rng(seed)``), so samples are
reproducible across runs and platforms.

Beyond the contour conditions the samplers cap parameter moduli at
``max_modulus``: the uniform rule on the torus converges like
``max_modulus ** N``, so the cap is what keeps grids at desk scale.
"""

from __future__ import annotations

import cmath
import enum
import math
from collections import Counter
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import DenominatorZero, Infeasible
from .qseries import Nome, theta

DEFAULT_NOME = Nome(0.08, 0.11)
DEFAULT_MARGIN = 0.05
DEFAULT_MAX_MODULUS = 0.75
MAX_ROUNDS = 10_000
BALANCE_RTOL = 1e-14


class IdentityKind(enum.Enum):
    DixonTransform = "dixon"
    DixonEval = "dixon-eval"
    SelbergEval = "selberg-eval"
    SelbergTransform = "selberg-transform"
    MainTheorem = "main"
    LemmaSym = "lemma-sym"
    BH1 = "bh1"
    BH2 = "bh2"
    BH3 = "bh3"
    ClassicalEuler = "classical-euler"
    ClassicalContiguous = "classical-contiguous"
    GammaLimitP0 = "gamma-limit"

    @classmethod
    def parse(cls, name: str) -> "IdentityKind":
        for kind in cls:
            if name in (kind.value, kind.name):
                return kind
        raise ValueError(f"unknown identity {name!r}")


# -- parameter sets ---------------------------------------------------------


def _ctuple(xs):
    return tuple(complex(x) for x in xs)


@dataclass(frozen=True)
class EllipticParams:
    """Parameters of the main transformation (n, m, k = n + m)."""

    nome: Nome
    t: complex
    t_r: tuple
    v_r: tuple
    n: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "t_r", _ctuple(self.t_r))
        object.__setattr__(self, "v_r", _ctuple(self.v_r))

    @property
    def k(self) -> int:
        return len(self.v_r) // 2


@dataclass(frozen=True)
class DixonParams:
    nome: Nome
    t_r: tuple
    n: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "t_r", _ctuple(self.t_r))


@dataclass(frozen=True)
class SelbergParams:
    """Six (evaluation) or eight (transformation) parameters plus t."""

    nome: Nome
    t: complex
    t_r: tuple
    n: int

    def __post_init__(self):
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "t_r", _ctuple(self.t_r))

    @property
    def v(self) -> complex:
        """Principal square root of pq / (t^{n-1} t_1 t_2 t_3 t_4)."""
        t1, t2, t3, t4 = self.t_r[:4]
        return cmath.sqrt(self.nome.pq / (self.t ** (self.n - 1) * t1 * t2 * t3 * t4))


@dataclass(frozen=True)
class LemmaParams:
    """Theta-sum parameters: nome p, t, u_0..u_3 and the point z."""

    p: complex
    t: complex
    u: tuple
    z: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "u", _ctuple(self.u))
        object.__setattr__(self, "z", _ctuple(self.z))

    @property
    def n(self) -> int:
        return len(self.z)


@dataclass(frozen=True)
class BHParams1:
    """Basic hypergeometric limit of the main transformation (k <= n + m)."""

    q: complex
    t: complex
    t_r: tuple
    v_r: tuple
    n: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "q", complex(self.q))
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "t_r", _ctuple(self.t_r))
        object.__setattr__(self, "v_r", _ctuple(self.v_r))

    @property
    def k(self) -> int:
        return len(self.v_r)


@dataclass(frozen=True)
class BHParams2:
    """Symmetry-broken limits; ``which`` selects the TildeDeltaIII (2) or TildeDeltaAII (3) form."""

    q: complex
    t: complex
    t0: complex
    t1: complex
    s0: complex
    s1: complex
    v_r: tuple
    u2: complex
    u3: complex
    w2: complex
    w3: complex
    n: int
    m: int
    which: int = 2

    def __post_init__(self):
        for name in ("q", "t", "t0", "t1", "s0", "s1", "u2", "u3", "w2", "w3"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        object.__setattr__(self, "v_r", _ctuple(self.v_r))

    @property
    def k(self) -> int:
        return len(self.v_r)


@dataclass(frozen=True)
class ClassicalParams:
    """Real-interval parameters; tau is fixed by the identity's balancing."""

    a0: float
    a1: float
    b: tuple
    alpha0: float
    alpha1: float
    n: int
    which: str = "euler"

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))

    @property
    def tau(self) -> float:
        if self.which == "euler":
            return (self.alpha0 + self.alpha1) / 2
        return self.alpha0 + self.alpha1


@dataclass(frozen=True)
class GammaLimitParams:
    z: complex
    q: complex

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "q", complex(self.q))


# -- admissibility ----------------------------------------------------------


def _rel_residual(lhs: complex, rhs: complex) -> float:
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


def _lt(a: float, b: float, margin: float) -> bool:
    """a < b with relative slack: a * (1 + margin) <= b."""
    return a * (1 + margin) <= b if margin > 0 else a < b


def violations(params, margin: float = 0.0) -> list:
    """Every contour or balancing condition ``params`` fails, as strings."""
    out = []
    if isinstance(params, EllipticParams):
        pq, t = params.nome.pq, params.t
        n, m = params.n, params.m
        if len(params.t_r) != 4:
            out.append("need exactly 4 t_r")
        if len(params.v_r) != 2 * (n + m):
            out.append(f"need 2k = {2 * (n + m)} v_r")
        if len(params.t_r) == 4 and _rel_residual(np.prod(params.t_r), t ** (2 + m - n)) > BALANCE_RTOL:
            out.append("balancing t0 t1 t2 t3 = t^(2+m-n)")
        for i in range(len(params.v_r) // 2):
            if _rel_residual(params.v_r[2 * i] * params.v_r[2 * i + 1], pq / t) > BALANCE_RTOL:
                out.append(f"balancing v_{2 * i} v_{2 * i + 1} = pq/t")
        if not (_lt(abs(pq), abs(t), margin) and _lt(abs(t), 1, margin)):
            out.append("|pq| < |t| < 1")
        for r, x in enumerate(params.t_r):
            if not (_lt(abs(t), abs(x), margin) and _lt(abs(x), 1, margin)):
                out.append(f"|t| < |t_{r}| < 1")
        for r, x in enumerate(params.v_r):
            if not _lt(abs(x), 1, margin):
                out.append(f"|v_{r}| < 1")
    elif isinstance(params, DixonParams):
        pq = params.nome.pq
        need = 2 * params.n + 2 * params.m + 4
        if len(params.t_r) != need:
            out.append(f"need {need} parameters")
        if _rel_residual(np.prod(params.t_r), pq ** (params.m + 1)) > BALANCE_RTOL:
            out.append("balancing prod t_r = (pq)^(m+1)")
        for r, x in enumerate(params.t_r):
            if not (_lt(math.sqrt(abs(pq)), abs(x), margin) and _lt(abs(x), 1, margin)):
                out.append(f"|sqrt(pq)| < |t_{r}| < 1")
    elif isinstance(params, SelbergParams):
        pq, t, n = params.nome.pq, params.t, params.n
        count = len(params.t_r)
        if count not in (6, 8):
            out.append("need 6 or 8 parameters")
        target = pq if count == 6 else pq**2
        if _rel_residual(t ** (2 * (n - 1)) * np.prod(params.t_r), target) > BALANCE_RTOL:
            out.append("balancing t^(2(n-1)) prod t_r")
        if not _lt(abs(t), 1, margin):
            out.append("|t| < 1")
        for r, x in enumerate(params.t_r, start=1):
            if not _lt(abs(x), 1, margin):
                out.append(f"|t_{r}| < 1")
        if count == 8:
            v = params.v
            for r in range(4):
                if not _lt(abs(v * params.t_r[r]), 1, margin):
                    out.append(f"|v t_{r + 1}| < 1")
            for r in range(4, 8):
                if not abs(params.t_r[r] / v) * (1 + margin) <= 1:
                    out.append(f"|t_{r + 1}/v| <= 1")
    elif isinstance(params, LemmaParams):
        n = params.n
        if len(params.u) != 4:
            out.append("need 4 u parameters")
        elif _rel_residual(params.t ** (n - 1) * np.prod(params.u), params.p) > BALANCE_RTOL:
            out.append("balancing t^(n-1) u0 u1 u2 u3 = p")
        if not abs(params.p) < 1:
            out.append("|p| < 1")
        z = np.asarray(params.z)
        dens = [theta(np.concatenate([z**2, z**-2]), params.p)]
        for i in range(n):
            for j in range(i + 1, n):
                dens.append(theta(np.array([z[i] * z[j], z[i] / z[j], z[j] / z[i], 1 / (z[i] * z[j])]), params.p))
        if any(np.min(np.abs(d)) < 1e-8 for d in dens if d.size):
            out.append("theta denominators bounded away from 0")
    elif isinstance(params, BHParams1):
        t, n, m = params.t, params.n, params.m
        if len(params.t_r) != 4:
            out.append("need exactly 4 t_r")
        elif _rel_residual(np.prod(params.t_r), t ** (2 + m - n)) > BALANCE_RTOL:
            out.append("balancing t0 t1 t2 t3 = t^(2+m-n)")
        if params.k > n + m:
            out.append("k <= m + n")
        if not (abs(params.q) < 1 and _lt(abs(t), 1, margin)):
            out.append("|q| < 1, |t| < 1")
        for r, x in enumerate(params.t_r):
            if not (_lt(abs(t), abs(x), margin) and _lt(abs(x), 1, margin)):
                out.append(f"|t| < |t_{r}| < 1")
        for r, x in enumerate(params.v_r):
            if not _lt(abs(x), 1, margin):
                out.append(f"|v_{r}| < 1")
    elif isinstance(params, BHParams2):
        t, q, n, m = params.t, params.q, params.n, params.m
        if _rel_residual(params.t0 * params.t1 / (params.s0 * params.s1), t ** (m - n)) > BALANCE_RTOL:
            out.append("balancing t0 t1 / (s0 s1) = t^(m-n)")
        if _rel_residual(t ** (n + 1) * params.t0 * params.t1 * params.u2 * params.u3, q) > BALANCE_RTOL:
            out.append("balancing t^(n+1) t0 t1 u2 u3 = q")
        if _rel_residual(t ** (n + 1) * params.s0 * params.s1 * params.w2 * params.w3, q) > BALANCE_RTOL:
            out.append("balancing t^(n+1) s0 s1 w2 w3 = q")
        if params.which == 2 and params.k != n + m:
            out.append("k = m + n")
        if params.which == 3 and params.k > n + m:
            out.append("k <= m + n")
        if not (abs(q) < 1 and _lt(abs(t), 1, margin)):
            out.append("|q| < 1, |t| < 1")
        for name in ("t0", "t1", "s0", "s1"):
            x = abs(getattr(params, name))
            if not (_lt(1, x, margin) and _lt(x * abs(t), 1, margin)):
                out.append(f"1 < |{name}| < 1/|t|")
        for r, x in enumerate(params.v_r):
            if not _lt(abs(x), 1, margin):
                out.append(f"|v_{r}| < 1")
            if params.which == 2 and not _lt(abs(q), abs(t * x), margin):
                out.append(f"|q| < |t v_{r}|")
    elif isinstance(params, ClassicalParams):
        a0, a1, n = params.a0, params.a1, params.n
        if not a0 < a1:
            out.append("a0 < a1")
        need = 2 * n if params.which == "euler" else 2 * n - 1
        if len(params.b) != need:
            out.append(f"need {need} b parameters")
        for r, b in enumerate(params.b):
            if a0 <= b <= a1:
                out.append(f"b_{r} outside [a0, a1]")
        if not (params.alpha0 > 0 and params.alpha1 > 0):
            out.append("Re(alpha_r) > 0")
    elif isinstance(params, GammaLimitParams):
        if not abs(params.q) < 1:
            out.append("|q| < 1")
        if params.z == 0:
            out.append("z != 0")
    else:
        raise TypeError(f"no checker for {type(params).__name__}")
    return out


def check_admissible(params, margin: float = 0.0):
    """Raise Infeasible listing every failed condition; return params otherwise."""
    bad = violations(params, margin)
    if bad:
        raise Infeasible("inadmissible parameters: " + "; ".join(bad), Counter(bad))
    return params


# -- sampling ---------------------------------------------------------------


class _Sampler:
    def __init__(self, seed, margin):
        if not 0 < margin < 0.2:
            raise ValueError("margin must lie in (0, 0.2)")
        self.rng = np.random.default_rng(seed)
        self.margin = margin
        self.failures = Counter()

    def phase(self):
        return cmath.exp(2j * math.pi * self.rng.random())

    def modulus(self, lo, hi):
        return math.exp(self.rng.uniform(math.log(lo), math.log(hi)))

    def complex(self, lo, hi):
        return self.modulus(lo, hi) * self.phase()

    def balanced(self, count, target, lo, hi, label):
        """``count`` values with lo < |x| < hi whose product is ``target``.

        Log-moduli are drawn uniformly and shifted to the required sum; the
        last value is then solved exactly from the balancing condition.
        """
        ll, lh = math.log(lo), math.log(hi)
        logs = self.rng.uniform(ll, lh, size=count)
        logs += (math.log(abs(target)) - logs.sum()) / count
        phases = [self.phase() for _ in range(count - 1)]
        if np.any(logs <= ll) or np.any(logs >= lh):
            self.failures[label] += 1
            return None
        vals = [math.exp(x) * ph for x, ph in zip(logs[:-1], phases)]
        vals.append(target / np.prod(vals) if vals else complex(target))
        if not ll < math.log(abs(vals[-1])) < lh:
            self.failures[label] += 1
            return None
        return [complex(v) for v in vals]

    def accept(self, params):
        bad = violations(params, self.margin)
        for b in bad:
            self.failures[b] += 1
        return not bad

    def infeasible(self, what):
        worst = self.failures.most_common(1)
        detail = f"; most frequent failure: {worst[0][0]} ({worst[0][1]}x)" if worst else ""
        return Infeasible(f"{what}: no admissible sample in {MAX_ROUNDS} rounds{detail}", self.failures)


def _shrunk(margin, cap):
    return min(1 - margin, cap)


def sample_main(n: int, m: int, seed: int, margin: float = DEFAULT_MARGIN,
                nome: Nome = DEFAULT_NOME, max_modulus: float = DEFAULT_MAX_MODULUS,
                t_range=(0.15, 0.35)) -> EllipticParams:
    """Admissible parameters of the main transformation with k = n + m pairs of v's."""
    if n < 0 or m < 0:
        raise ValueError("n, m must be >= 0")
    s = _Sampler(seed, margin)
    pq = nome.pq
    hi = _shrunk(margin, max_modulus)
    t_lo = max(t_range[0], abs(pq) * (1 + margin))
    t_hi = min(t_range[1], hi)
    for _ in range(MAX_ROUNDS):
        if not t_lo < t_hi:
            s.failures["|pq| < |t| < 1"] += 1
            break
        t = s.complex(t_lo, t_hi)
        t_r = s.balanced(4, t ** (2 + m - n), abs(t) * (1 + margin), hi, "|t| < |t_r| < 1")
        if t_r is None:
            continue
        v_r = []
        vlo = abs(pq / t) / hi
        if not vlo < hi:
            s.failures["|v_r| < 1"] += 1
            continue
        for _ in range(n + m):
            v0 = s.complex(vlo, hi)
            v_r += [v0, pq / (t * v0)]
        params = EllipticParams(nome, t, t_r, v_r, n, m)
        if s.accept(params):
            return params
    raise s.infeasible(f"main theorem (n={n}, m={m})")


def sample_dixon(n: int, m: int, seed: int, margin: float = DEFAULT_MARGIN,
                 nome: Nome = DEFAULT_NOME, max_modulus: float = DEFAULT_MAX_MODULUS) -> DixonParams:
    s = _Sampler(seed, margin)
    pq = nome.pq
    lo = math.sqrt(abs(pq)) * (1 + margin)
    hi = _shrunk(margin, max_modulus)
    for _ in range(MAX_ROUNDS):
        t_r = s.balanced(2 * n + 2 * m + 4, pq ** (m + 1), lo, hi, "|sqrt(pq)| < |t_r| < 1")
        if t_r is None:
            continue
        params = DixonParams(nome, t_r, n, m)
        if s.accept(params):
            return params
    raise s.infeasible(f"Dixon (n={n}, m={m})")


def sample_selberg(n: int, transform: bool, seed: int, margin: float = DEFAULT_MARGIN,
                   nome: Nome = DEFAULT_NOME, max_modulus: float = DEFAULT_MAX_MODULUS,
                   t_range=(0.3, 0.5)) -> SelbergParams:
    s = _Sampler(seed, margin)
    pq = nome.pq
    hi = _shrunk(margin, max_modulus)
    count = 8 if transform else 6
    target = pq**2 if transform else pq
    for _ in range(MAX_ROUNDS):
        t = s.complex(*t_range)
        t_r = s.balanced(count, target / t ** (2 * (n - 1)), 0.1, hi, "|t_r| < 1")
        if t_r is None:
            continue
        params = SelbergParams(nome, t, t_r, n)
        if transform:
            # both sides' parameters stay under the quadrature cap
            v = params.v
            if max(abs(v * x) for x in t_r[:4]) > hi or max(abs(x / v) for x in t_r[4:]) > hi:
                s.failures["transformed parameters within max_modulus"] += 1
                continue
        if s.accept(params):
            return params
    raise s.infeasible(f"Selberg {'transform' if transform else 'evaluation'} (n={n})")


LEMMA_MAX_CONDITION = 1e3


def lemma_condition(params: LemmaParams) -> float:
    """sum |term| / |closed form|: the cancellation factor of the 2^n-term sum."""
    from .identities.basic import lemma_products, lemma_terms

    try:
        return float(np.sum(np.abs(lemma_terms(params))) / abs(lemma_products(params)[0]))
    except (DenominatorZero, ZeroDivisionError):
        return math.inf


def sample_lemma(n: int, seed: int, margin: float = DEFAULT_MARGIN, p: complex = 0.3) -> LemmaParams:
    s = _Sampler(seed, margin)
    for _ in range(MAX_ROUNDS):
        t = s.complex(0.85, 1.15)
        # u moduli log-balanced around their geometric mean keep every theta O(1)
        mean = abs(p / t ** (n - 1)) ** 0.25
        u = s.balanced(4, p / t ** (n - 1), mean / 1.6, mean * 1.6, "|u_r| near balance")
        if u is None:
            continue
        z = [s.complex(0.8, 1.25) for _ in range(n)]
        params = LemmaParams(p, t, u, z)
        if not s.accept(params):
            continue
        # double precision resolves the sum only when it does not cancel badly
        if lemma_condition(params) > LEMMA_MAX_CONDITION:
            s.failures["sum condition number <= 1e3"] += 1
            continue
        return params
    raise s.infeasible(f"theta-sum lemma (n={n})")


def sample_bh1(n: int, m: int, k: int, seed: int, margin: float = DEFAULT_MARGIN,
               q: complex = DEFAULT_NOME.q, max_modulus: float = DEFAULT_MAX_MODULUS,
               t_range=(0.15, 0.35)) -> BHParams1:
    if k > n + m:
        raise ValueError("need k <= n + m")
    s = _Sampler(seed, margin)
    hi = _shrunk(margin, max_modulus)
    for _ in range(MAX_ROUNDS):
        t = s.complex(*t_range)
        t_r = s.balanced(4, t ** (2 + m - n), abs(t) * (1 + margin), hi, "|t| < |t_r| < 1")
        if t_r is None:
            continue
        v_r = [s.complex(0.05, hi) for _ in range(k)]
        params = BHParams1(q, t, t_r, v_r, n, m)
        if s.accept(params):
            return params
    raise s.infeasible(f"basic limit 1 (n={n}, m={m}, k={k})")


def sample_bh2(n: int, m: int, seed: int, which: int = 2, k: int | None = None,
               margin: float = DEFAULT_MARGIN, q: complex = DEFAULT_NOME.q,
               max_modulus: float = DEFAULT_MAX_MODULUS, t_range=(0.22, 0.35)) -> BHParams2:
    k = n + m if k is None else k
    s = _Sampler(seed, margin)
    hi = _shrunk(margin, max_modulus)
    for _ in range(MAX_ROUNDS):
        t = s.complex(*t_range)
        lo_big, hi_big = 1 / hi, hi / abs(t)
        if not lo_big < hi_big:
            s.failures["1 < |t_r| < 1/|t|"] += 1
            continue
        t0, t1, s0 = (s.complex(lo_big, hi_big) for _ in range(3))
        s1 = t0 * t1 / (s0 * t ** (m - n))
        vlo = abs(q / t) / hi if which == 2 else 0.05
        if not vlo < hi:
            s.failures["|q| < |t v_r|"] += 1
            continue
        v_r = [s.complex(vlo, hi) for _ in range(k)]
        target_u = q / (t ** (n + 1) * t0 * t1)
        target_w = q / (t ** (n + 1) * s0 * s1)
        u2 = s.complex(0.5, 2.0) * math.sqrt(abs(target_u))
        w2 = s.complex(0.5, 2.0) * math.sqrt(abs(target_w))
        params = BHParams2(q, t, t0, t1, s0, s1, v_r, u2, target_u / u2, w2, target_w / w2, n, m, which)
        if not (lo_big < abs(s1) < hi_big):
            s.failures["1 < |s1| < 1/|t|"] += 1
            continue
        if s.accept(params):
            return params
    raise s.infeasible(f"basic limit {which} (n={n}, m={m})")


def sample_classical(n: int, which: str, seed: int, margin: float = DEFAULT_MARGIN) -> ClassicalParams:
    s = _Sampler(seed, margin)
    count = 2 * n if which == "euler" else 2 * n - 1
    alpha0 = s.rng.uniform(0.4, 1.6)
    alpha1 = s.rng.uniform(0.4, 1.6)
    b = s.rng.uniform(-3.0, -0.5, size=count)
    return check_admissible(ClassicalParams(0.0, 1.0, tuple(b), alpha0, alpha1, n, which))


def sample_gamma_limit(seed: int, margin: float = DEFAULT_MARGIN, q: complex = 0.3) -> GammaLimitParams:
    s = _Sampler(seed, margin)
    return GammaLimitParams(s.complex(0.3, 0.9), q)


def sample_for(identity: IdentityKind, dims, seed: int, margin: float = DEFAULT_MARGIN, **kwargs):
    """Dispatch to the sampler of ``identity``; ``dims`` is (n, m, k) with unused entries ignored."""
    identity = IdentityKind.parse(identity) if isinstance(identity, str) else identity
    n, m, k = (tuple(dims) + (None, None, None))[:3]
    if identity is IdentityKind.MainTheorem:
        return sample_main(n, m, seed, margin, **kwargs)
    if identity is IdentityKind.DixonTransform:
        return sample_dixon(n, m, seed, margin, **kwargs)
    if identity is IdentityKind.DixonEval:
        return sample_dixon(n, 0, seed, margin, **kwargs)
    if identity is IdentityKind.SelbergEval:
        return sample_selberg(n, False, seed, margin, **kwargs)
    if identity is IdentityKind.SelbergTransform:
        return sample_selberg(n, True, seed, margin, **kwargs)
    if identity is IdentityKind.LemmaSym:
        return sample_lemma(n, seed, margin, **kwargs)
    if identity is IdentityKind.BH1:
        return sample_bh1(n, m, n + m if k is None else k, seed, margin, **kwargs)
    if identity is IdentityKind.BH2:
        return sample_bh2(n, m, seed, 2, None, margin, **kwargs)
    if identity is IdentityKind.BH3:
        return sample_bh2(n, m, seed, 3, k, margin, **kwargs)
    if identity is IdentityKind.ClassicalEuler:
        return sample_classical(n, "euler", seed, margin)
    if identity is IdentityKind.ClassicalContiguous:
        return sample_classical(n, "contiguous", seed, margin)
    if identity is IdentityKind.GammaLimitP0:
        return sample_gamma_limit(seed, margin, **kwargs)
    raise ValueError(identity)


# -- flat (file) representation ----------------------------------------------


def to_flat(params) -> dict:
    """Flat name -> value mapping used by parameter files and reports."""
    if isinstance(params, (EllipticParams, DixonParams, SelbergParams)):
        d = {"p": params.nome.p, "q": params.nome.q}
    else:
        d = {}
    if isinstance(params, EllipticParams):
        d["t"] = params.t
        d.update({f"t{r}": x for r, x in enumerate(params.t_r)})
        d.update({f"v{r}": x for r, x in enumerate(params.v_r)})
        d.update(n=params.n, m=params.m, k=params.k)
    elif isinstance(params, DixonParams):
        d.update({f"t{r}": x for r, x in enumerate(params.t_r)})
        d.update(n=params.n, m=params.m)
    elif isinstance(params, SelbergParams):
        d["t"] = params.t
        d.update({f"t{r}": x for r, x in enumerate(params.t_r, start=1)})
        d.update(n=params.n)
    elif isinstance(params, LemmaParams):
        d.update(p=params.p, t=params.t)
        d.update({f"u{r}": x for r, x in enumerate(params.u)})
        d.update({f"z{i + 1}": x for i, x in enumerate(params.z)})
        d.update(n=params.n)
    elif isinstance(params, BHParams1):
        d.update(q=params.q, t=params.t)
        d.update({f"t{r}": x for r, x in enumerate(params.t_r)})
        d.update({f"v{r}": x for r, x in enumerate(params.v_r)})
        d.update(n=params.n, m=params.m, k=params.k)
    elif isinstance(params, BHParams2):
        for name in ("q", "t", "t0", "t1", "s0", "s1", "u2", "u3", "w2", "w3"):
            d[name] = getattr(params, name)
        d.update({f"v{r}": x for r, x in enumerate(params.v_r)})
        d.update(n=params.n, m=params.m, k=params.k)
    elif isinstance(params, ClassicalParams):
        d.update(a0=params.a0, a1=params.a1, alpha0=params.alpha0, alpha1=params.alpha1)
        d.update({f"b{r}": x for r, x in enumerate(params.b)})
        d.update(n=params.n)
    elif isinstance(params, GammaLimitParams):
        d.update(z=params.z, q=params.q)
    else:
        raise TypeError(type(params).__name__)
    return d


def _indexed(d, prefix, start=0):
    out = []
    i = start
    while f"{prefix}{i}" in d:
        out.append(d[f"{prefix}{i}"])
        i += 1
    return out


def from_flat(identity: IdentityKind, d: dict):
    """Inverse of :func:`to_flat`; raises KeyError naming a missing field."""

    def need(name):
        if name not in d:
            raise KeyError(name)
        return d[name]

    def integer(name):
        val = complex(need(name))
        if val.imag != 0 or val.real != int(val.real):
            raise ValueError(f"field {name!r} must be an integer")
        return int(val.real)

    if identity in (IdentityKind.MainTheorem, IdentityKind.DixonTransform, IdentityKind.DixonEval,
                    IdentityKind.SelbergEval, IdentityKind.SelbergTransform):
        nome = Nome(need("p"), need("q"))
    if identity is IdentityKind.MainTheorem:
        return EllipticParams(nome, need("t"), _indexed(d, "t"), _indexed(d, "v"), integer("n"), integer("m"))
    if identity in (IdentityKind.DixonTransform, IdentityKind.DixonEval):
        m = integer("m") if identity is IdentityKind.DixonTransform else 0
        return DixonParams(nome, _indexed(d, "t"), integer("n"), m)
    if identity in (IdentityKind.SelbergEval, IdentityKind.SelbergTransform):
        return SelbergParams(nome, need("t"), _indexed(d, "t", start=1), integer("n"))
    if identity is IdentityKind.LemmaSym:
        return LemmaParams(need("p"), need("t"), _indexed(d, "u"), _indexed(d, "z", start=1))
    if identity is IdentityKind.BH1:
        return BHParams1(need("q"), need("t"), _indexed(d, "t"), _indexed(d, "v"), integer("n"), integer("m"))
    if identity in (IdentityKind.BH2, IdentityKind.BH3):
        names = ("q", "t", "t0", "t1", "s0", "s1")
        vals = [need(x) for x in names]
        return BHParams2(*vals, _indexed(d, "v"), need("u2"), need("u3"), need("w2"), need("w3"),
                         integer("n"), integer("m"), 2 if identity is IdentityKind.BH2 else 3)
    if identity in (IdentityKind.ClassicalEuler, IdentityKind.ClassicalContiguous):
        which = "euler" if identity is IdentityKind.ClassicalEuler else "contiguous"
        real = {}
        for name in ("a0", "a1", "alpha0", "alpha1"):
            val = complex(need(name))
            if val.imag != 0:
                raise ValueError(f"field {name!r} must be real")
            real[name] = val.real
        b = [complex(x).real for x in _indexed(d, "b")]
        return ClassicalParams(real["a0"], real["a1"], b, real["alpha0"], real["alpha1"], integer("n"), which)
    if identity is IdentityKind.GammaLimitP0:
        return GammaLimitParams(need("z"), need("q"))
    raise ValueError(identity)


def conjugate(params):
    """Complex-conjugate every parameter."""
    if isinstance(params, EllipticParams):
        return replace(params, nome=params.nome.conjugate(), t=params.t.conjugate(),
                       t_r=[x.conjugate() for x in params.t_r], v_r=[x.conjugate() for x in params.v_r])
    if isinstance(params, DixonParams):
        return replace(params, nome=params.nome.conjugate(), t_r=[x.conjugate() for x in params.t_r])
    if isinstance(params, SelbergParams):
        return replace(params, nome=params.nome.conjugate(), t=params.t.conjugate(),
                       t_r=[x.conjugate() for x in params.t_r])
    raise TypeError(type(params).__name__)
