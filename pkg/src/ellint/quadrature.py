"""Quadrature on the n-torus and on real cubes, plus grid refinement.

Torus integrals use the measure prod_i dz_i / (2 pi i z_i) on unit circles,
discretized by the uniform (trapezoid) rule.  Real-interval integrals use
Gauss-Jacobi rules with the endpoint singularities folded into the weight.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NoConvergence, NodeComputationFailure, PoleHit

# Node blocks are a fixed size so the reduction tree never depends on the
# number of workers.
BLOCK_SIZE = 4096


def tree_sum(values) -> complex:
    """Pairwise (binary tree) sum in a fixed order."""
    v = np.asarray(values, dtype=complex).ravel()
    if v.size == 0:
        return 0j
    while v.size > 1:
        if v.size % 2:
            v = np.append(v, 0j)
        v = v[0::2] + v[1::2]
    return complex(v[0])


def default_workers() -> int:
    env = os.environ.get("ELLINT_THREADS")
    if env:
        return max(1, int(env))
    return 1


# -- torus ------------------------------------------------------------------


@dataclass(frozen=True)
class TorusGrid:
    """N points per circle on the n-torus, z_k = exp(2 pi i (k + phase_offset) / N)."""

    n: int
    N: int
    phase_offset: float = 0.5

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("dimension n must be >= 0")
        if self.N < 4:
            raise ValueError("need at least 4 points per circle")

    def nodes(self) -> np.ndarray:
        k = np.arange(self.N)
        return np.exp(2j * np.pi * (k + self.phase_offset) / self.N)

    def points(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Rows of the product grid in lexicographic order, shape (P, n)."""
        total = self.N**self.n
        stop = total if stop is None else min(stop, total)
        idx = np.arange(start, stop)
        nodes = self.nodes()
        cols = []
        for d in range(self.n - 1, -1, -1):
            cols.append(nodes[(idx // self.N**d) % self.N])
        if not cols:
            return np.empty((stop - start, 0), dtype=complex)
        return np.stack(cols, axis=-1)

    def refined(self) -> "TorusGrid":
        return TorusGrid(self.n, 2 * self.N, self.phase_offset)


def torus_integrate(f: Callable[[np.ndarray], np.ndarray], grid: TorusGrid,
                    workers: int | None = None) -> complex:
    """N^{-n} sum of f over all grid nodes.

    ``f`` maps an array of points of shape (P, n) to P values.  Blocks of
    nodes may be evaluated by several threads; the reduction order is fixed,
    so the result is bit-identical for any worker count.
    """
    total = grid.N**grid.n
    blocks = [(s, min(s + BLOCK_SIZE, total)) for s in range(0, total, BLOCK_SIZE)]

    def run(block):
        vals = np.asarray(f(grid.points(*block)), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise PoleHit("integrand is not finite at a grid node")
        return tree_sum(vals)

    workers = default_workers() if workers is None else workers
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run, blocks))
    else:
        partials = [run(b) for b in blocks]
    return tree_sum(partials) / total


def torus_integrate_factored(single: np.ndarray, pair: np.ndarray | None, n: int) -> complex:
    """Uniform-rule integral of prod_i single(z_i) prod_{i<j} pair(z_i, z_j).

    ``single`` holds the univariate factor at the N nodes of one circle and
    ``pair[a, b]`` the cross factor at (node_a, node_b).  Contracting the
    factors avoids evaluating anything on the full N^n product grid.
    """
    single = np.asarray(single, dtype=complex)
    N = single.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n == 1:
        return tree_sum(single) / N
    letters = "abcdefghijklmnop"[:n]
    operands = [single] * n
    subs = list(letters)
    for i in range(n):
        for j in range(i + 1, n):
            subs.append(letters[i] + letters[j])
            operands.append(pair)
    total = np.einsum(",".join(subs) + "->", *operands, optimize=False)
    return complex(total) / N**n


# -- classical gamma --------------------------------------------------------

# B_{2j} / (2j (2j - 1)) for j = 1..8
_STIRLING = (
    1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188,
    -691 / 360360, 1 / 156, -3617 / 122400,
)
_SHIFT_TO = 15.0


def classical_gamma(x) -> complex:
    """Euler's gamma function.

    Stirling's series for log-gamma at |x| >= 15, reached by upward
    recurrence; reflection for Re x < 1/2.
    """
    x = complex(x)
    if x.imag == 0 and x.real <= 0 and x.real == math.floor(x.real):
        raise PoleHit(f"classical gamma has a pole at {x.real:g}")
    if x.real < 0.5:
        return cmath.pi / (cmath.sin(cmath.pi * x) * classical_gamma(1 - x))
    k = max(0, math.ceil(_SHIFT_TO - x.real))
    z = x + k
    inv = 1 / z
    inv2 = inv * inv
    series = 0j
    power = inv
    for c in _STIRLING:
        series += c * power
        power *= inv2
    lg = (z - 0.5) * cmath.log(z) - z + 0.5 * math.log(2 * math.pi) + series
    shift = 1 + 0j
    for i in range(k):
        shift *= x + i
    return cmath.exp(lg) / shift


def beta_function(a, b) -> complex:
    return classical_gamma(a) * classical_gamma(b) / classical_gamma(a + b)


# -- Gauss-Jacobi -----------------------------------------------------------


@dataclass(frozen=True)
class JacobiRule:
    """M-point Gauss rule for the weight (x - a)^{alpha-1} (b - x)^{beta-1} on [a, b]."""

    a: float
    b: float
    alpha_exponent: complex
    beta_exponent: complex
    M: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("need a < b")
        if not (complex(self.alpha_exponent).real > 0 and complex(self.beta_exponent).real > 0):
            raise ValueError("endpoint exponents need positive real part")
        if self.M < 1:
            raise ValueError("need M >= 1")

    def with_size(self, M: int) -> "JacobiRule":
        return JacobiRule(self.a, self.b, self.alpha_exponent, self.beta_exponent, M)

    def nodes_weights(self):
        xi, w = gauss_jacobi(self.M, complex(self.beta_exponent) - 1, complex(self.alpha_exponent) - 1)
        half = (self.b - self.a) / 2
        x = self.a + half * (1 + xi)
        w = w * half ** (complex(self.alpha_exponent) + complex(self.beta_exponent) - 1)
        if np.all(np.imag(w) == 0):
            w = np.real(w)
        return x, w


def gauss_jacobi(M: int, A, B):
    """Nodes and weights for (1 - x)^A (1 + x)^B on [-1, 1] (Golub-Welsch).

    Complex A, B use the complex symmetric Jacobi matrix.  The nodes are then
    complex in general and the rule is exact for polynomials, so integrands
    must be supplied as analytic functions.
    """
    A, B = complex(A), complex(B)
    if A.real <= -1 or B.real <= -1:
        raise NodeComputationFailure(f"Gauss-Jacobi({A}, {B}): weight is not integrable")
    k = np.arange(M, dtype=float)
    s = 2 * k + A + B
    diag = np.empty(M, dtype=complex)
    diag[0] = (B - A) / (A + B + 2)
    if M > 1:
        kk = k[1:]
        ss = s[1:]
        diag[1:] = (B * B - A * A) / (ss * (ss + 2))
    off2 = np.empty(max(M - 1, 0), dtype=complex)
    if M > 1:
        kk = np.arange(1, M, dtype=float)
        ss = 2 * kk + A + B
        ratio = np.where(kk == 1, 1.0, (kk + A + B) / np.where(kk == 1, 1.0, ss - 1))
        off2 = 4 * kk * (kk + A) * (kk + B) * ratio / (ss * ss * (ss + 1))
    mu0 = 2 ** (A + B + 1) * classical_gamma(A + 1) * classical_gamma(B + 1) / classical_gamma(A + B + 2)
    if A.imag == 0 and B.imag == 0:
        from scipy.linalg import eigh_tridiagonal

        x, vecs = eigh_tridiagonal(diag.real, np.sqrt(off2.real))
        w = mu0.real * vecs[0, :] ** 2
    else:
        J = np.diag(diag) + np.diag(np.sqrt(off2), 1) + np.diag(np.sqrt(off2), -1)
        x, vecs = np.linalg.eig(J)
        norms = np.sum(vecs * vecs, axis=0)
        w = mu0 * vecs[0, :] ** 2 / norms
        order = np.argsort(x.real)
        x, w = x[order], w[order]
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise NodeComputationFailure(f"Gauss-Jacobi({A}, {B}) produced non-finite nodes")
        return x, w
    if x.size != M or np.any(x <= -1) or np.any(x >= 1) or not np.all(np.isfinite(w)):
        raise NodeComputationFailure(f"Gauss-Jacobi({A}, {B}) failed to produce {M} interior nodes")
    return x, w


def _tensor_points(x, w, n):
    if n == 0:
        return np.empty((1, 0)), np.ones(1)
    grids = np.meshgrid(*([x] * n), indexing="ij")
    wgrids = np.meshgrid(*([w] * n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wts = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return pts, wts


def jacobi_integrate(g: Callable[[np.ndarray], np.ndarray], rule: JacobiRule, n: int,
                     pair_exponent: complex = 0) -> complex:
    """Integral over [a, b]^n of prod_i (x_i - a)^{alpha-1} (b - x_i)^{beta-1} g(x).

    ``g`` maps points of shape (P, n) to P values and should be smooth on the
    closed cube.  A nonzero ``pair_exponent`` c adds the factor
    prod_{i<j} |x_i - x_j|^c to the weight; for n = 2 that singular factor
    is integrated exactly by splitting the cube along the diagonal (see
    :func:`_pair_weighted_2d`).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if pair_exponent != 0 and n >= 2:
        if n > 2:
            raise NotImplementedError("pairwise singular weight is supported for n <= 2")
        return _pair_weighted_2d(g, rule, complex(pair_exponent))
    x, w = rule.nodes_weights()
    pts, wts = _tensor_points(x, w, n)
    vals = np.asarray(g(pts), dtype=complex)
    return tree_sum(wts * vals)


# Vertices of the triangle {0 < u1 < u2 < 1} and the six apex-anchored
# sub-triangles of its barycentric subdivision.
_A, _B, _C = np.array([0.0, 0.0]), np.array([0.0, 1.0]), np.array([1.0, 1.0])
_MAB, _MBC, _MAC = (_A + _B) / 2, (_B + _C) / 2, (_A + _C) / 2
_G = (_A + _B + _C) / 3
_SUBTRIANGLES = (
    (_A, _MAB, _G), (_A, _G, _MAC),
    (_B, _MBC, _G), (_B, _G, _MAB),
    (_C, _MAC, _G), (_C, _G, _MBC),
)


def _pair_weighted_2d(g, rule: JacobiRule, c: complex) -> complex:
    """2-d integral with weight prod_i (x_i-a)^{al-1}(b-x_i)^{be-1} |x_1-x_2|^c.

    In unit coordinates u = (x - a)/(b - a) the weight is a product of
    powers of the affine forms u1, u2, 1-u1, 1-u2 and u2-u1 (on u1 < u2).
    Each sub-triangle is mapped from the unit square with a Duffy map
    anchored at a vertex of the big triangle, which turns every form
    vanishing at that vertex into s * (form vanishing on a w-edge or a
    positive constant); those powers become Gauss-Jacobi weights in s and
    w and the leftover integrand is analytic.
    """
    a, b = rule.a, rule.b
    L = b - a
    ea = complex(rule.alpha_exponent) - 1
    eb = complex(rule.beta_exponent) - 1
    forms = (  # (coeffs on (u1, u2), constant, exponent)
        (np.array([1.0, 0.0]), 0.0, ea),
        (np.array([0.0, 1.0]), 0.0, ea),
        (np.array([-1.0, 0.0]), 1.0, eb),
        (np.array([0.0, -1.0]), 1.0, eb),
        (np.array([-1.0, 1.0]), 0.0, c),
    )
    M = rule.M
    total = []
    for V, P1, P2 in _SUBTRIANGLES:
        d1, d2 = P1 - V, P2 - V
        area = abs(d1[0] * d2[1] - d1[1] * d2[0])
        es, ew0, ew1 = 1.0 + 0j, 0j, 0j  # the Duffy Jacobian contributes s^1
        for lin, const, e in forms:
            lv = lin @ V + const
            l1 = lin @ P1 + const
            l2 = lin @ P2 + const
            if abs(lv) < 1e-14:
                es += e
                if abs(l1) < 1e-14:
                    ew0 += e
                elif abs(l2) < 1e-14:
                    ew1 += e
        s, ws = JacobiRule(0.0, 1.0, es + 1, 1.0, M).nodes_weights()
        w, ww = JacobiRule(0.0, 1.0, ew0 + 1, ew1 + 1, M).nodes_weights()
        S, W = np.meshgrid(s, w, indexing="ij")
        S, W = S.ravel(), W.ravel()
        wt = np.multiply.outer(ws, ww).ravel().astype(complex) * area
        U = V[None, :] + S[:, None] * ((1 - W)[:, None] * d1[None, :] + W[:, None] * d2[None, :])
        for lin, const, e in forms:
            lv = lin @ V + const
            l1 = lin @ P1 + const
            l2 = lin @ P2 + const
            if abs(lv) < 1e-14:
                if abs(l1) < 1e-14:
                    rem = np.full(S.shape, l2)
                elif abs(l2) < 1e-14:
                    rem = np.full(S.shape, l1)
                else:
                    rem = (1 - W) * l1 + W * l2
            else:
                rem = U @ lin + const
            wt = wt * rem ** e
        X = a + L * U
        vals = np.asarray(g(X), dtype=complex) + np.asarray(g(X[:, ::-1]), dtype=complex)
        total.append(tree_sum(wt * vals))
    scale = L ** (2 * ea + 2 * eb + c + 2)
    return tree_sum(total) * scale


# -- refinement -------------------------------------------------------------


@dataclass
class HistoryEntry:
    size: int
    value: complex
    rel_change: float | None


@dataclass
class ConvergenceHistory:
    target_rel: float
    entries: list = field(default_factory=list)
    converged: bool = False

    @property
    def value(self) -> complex:
        return self.entries[-1].value if self.entries else complex("nan")

    @property
    def sizes(self) -> list:
        return [e.size for e in self.entries]

    def to_rows(self) -> list:
        return [
            [e.size, e.value.real, e.value.imag, e.rel_change]
            for e in self.entries
        ]

    @classmethod
    def exact(cls, value: complex) -> "ConvergenceHistory":
        """History of a closed-form side: one entry, trivially converged."""
        return cls(target_rel=0.0, entries=[HistoryEntry(0, complex(value), 0.0)], converged=True)


def rel_diff(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    if scale == 0:
        return 0.0
    return abs(a - b) / scale


def refine_until(integrator: Callable[[int], complex], start: int, target_rel: float,
                 max_level: int = 4) -> tuple[complex, ConvergenceHistory]:
    """Double the grid size until successive estimates agree to ``target_rel``.

    ``integrator(size)`` returns the estimate on a grid of the given size
    (points per circle, or Gauss nodes).  Raises NoConvergence, with the
    history attached, if ``max_level`` doublings do not suffice.
    """
    if not target_rel > 0:
        raise ValueError("target_rel must be positive")
    hist = ConvergenceHistory(target_rel)
    size = start
    prev = complex(integrator(size))
    hist.entries.append(HistoryEntry(size, prev, None))
    for _ in range(max_level):
        size *= 2
        cur = complex(integrator(size))
        change = rel_diff(cur, prev)
        hist.entries.append(HistoryEntry(size, cur, change))
        if change < target_rel:
            hist.converged = True
            return cur, hist
        prev = cur
    raise NoConvergence(
        f"no convergence to {target_rel:g} after {max_level} doublings "
        f"(last change {hist.entries[-1].rel_change:.3g})",
        history=hist,
    )
