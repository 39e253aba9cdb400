"""Shared machinery: integrand descriptions, side evaluation, reports."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import DenominatorZero, PoleHit
from ..kernels import KernelKind, classical_weight, gamma_pm, pair_factor, single_factor
from ..qseries import (
    POLE_THRESHOLD,
    Nome,
    qpochhammer,
    stable_prod,
    theta,
)
from ..quadrature import (
    ConvergenceHistory,
    JacobiRule,
    TorusGrid,
    jacobi_integrate,
    refine_until,
    rel_diff,
    torus_integrate_factored,
)
from ..sampling import IdentityKind, to_flat

PHASE_OFFSETS = (0.5, 0.25, 0.75, 0.125, 0.375)
DEFAULT_TORUS_START = {1: 64, 2: 48, 3: 32}
DEFAULT_TARGET = {1: 1e-10, 2: 1e-7, 3: 1e-6}
DEFAULT_JACOBI_START = 16


@dataclass(frozen=True)
class QuadratureSettings:
    """Refinement controls; ``None`` picks a per-dimension default."""

    target_rel: float | None = None
    grid_start: int | None = None
    max_level: int = 4

    def target_for(self, dim: int) -> float:
        if self.target_rel is not None:
            return self.target_rel
        return DEFAULT_TARGET[min(max(dim, 1), 3)]


DEFAULT_SETTINGS = QuadratureSettings()


# -- integrand descriptions ---------------------------------------------------


@dataclass(frozen=True)
class Factor:
    """One univariate factor, raised to ``power``.

    family ``gamma_pm``: Gamma(c z) Gamma(c/z);  ``qpoch``: (c z^sign; q);
    ``theta``: theta(c z^sign; q).
    """

    family: str
    coeff: complex
    sign: int = 1
    power: int = 1

    def evaluate(self, z, nome: Nome):
        if self.family == "gamma_pm":
            val = gamma_pm(self.coeff, z, nome=nome)
        else:
            arg = self.coeff * (z if self.sign == 1 else 1.0 / z)
            if self.family == "qpoch":
                val = qpochhammer(arg, nome.q)
            elif self.family == "theta":
                val = theta(arg, nome.q)
            else:
                raise ValueError(self.family)
            if self.power < 0 and np.any(np.abs(val) < POLE_THRESHOLD):
                raise DenominatorZero(f"({self.family} {self.coeff!r}) vanishes on the contour")
        return val if self.power == 1 else val**self.power


def gammas(*coeffs):
    return [Factor("gamma_pm", complex(c)) for c in coeffs]


def qpoch(c, sign=1, power=1):
    return Factor("qpoch", complex(c), sign, power)


def qpoch_pm(c, power=1):
    return [qpoch(c, 1, power), qpoch(c, -1, power)]


def theta_f(c, sign=1, power=1):
    return Factor("theta", complex(c), sign, power)


@dataclass(frozen=True)
class IntegrandSpec:
    """Kernel of ``kind`` in ``n`` torus variables times prod_i prod_f f(z_i)."""

    kind: KernelKind
    n: int
    nome: Nome
    t: complex | None
    factors: tuple

    def univariate(self, z):
        out = single_factor(self.kind, self.t, z, self.nome)
        for f in self.factors:
            out = out * f.evaluate(z, self.nome)
        return out

    def evaluate(self, z):
        """Integrand at points of shape (..., n)."""
        z = np.asarray(z, dtype=complex)
        out = np.ones(z.shape[:-1], dtype=complex)
        for i in range(self.n):
            out = out * self.univariate(z[..., i])
        for i in range(self.n):
            for j in range(i + 1, self.n):
                out = out * pair_factor(self.kind, self.t, z[..., i], z[..., j], self.nome)
        return out

    def integrate(self, N: int, phase_offset: float = 0.5) -> complex:
        """Uniform-rule value on the N^n grid via the factored contraction."""
        if self.n == 0:
            return 1.0 + 0j
        z = TorusGrid(self.n, N, phase_offset).nodes()
        single = self.univariate(z)
        pair = None
        if self.n > 1:
            pair = pair_factor(self.kind, self.t, z[:, None], z[None, :], self.nome)
        val = torus_integrate_factored(single, pair, self.n)
        if not np.isfinite(val):
            raise PoleHit("non-finite quadrature value")
        return val


@dataclass(frozen=True)
class IntervalSpec:
    """Selberg-type integrand on (a0, a1)^n (see kernels.classical_weight)."""

    n: int
    a0: float
    a1: float
    alpha0: float
    alpha1: float
    b: tuple
    tau: float

    def evaluate(self, x):
        return classical_weight(x, (self.a0, self.a1), self.b, (self.alpha0, self.alpha1), self.tau)

    def integrate(self, M: int) -> complex:
        if self.n == 0:
            return 1.0 + 0j
        rule = JacobiRule(self.a0, self.a1, self.alpha0, self.alpha1, M)
        b = np.asarray(self.b)

        def g(x):
            out = np.ones(x.shape[:-1], dtype=complex)
            for i in range(x.shape[-1]):
                out = out * np.prod(np.abs(x[..., i, None] - b) ** (-self.tau), axis=-1)
            return out

        return jacobi_integrate(g, rule, self.n, pair_exponent=2 * self.tau)


# -- side evaluation --------------------------------------------------------


@dataclass
class SideResult:
    value: complex
    history: ConvergenceHistory
    phase_offset: float | None = None


def integrate_side(spec, settings: QuadratureSettings = DEFAULT_SETTINGS) -> SideResult:
    """Refine ``spec`` until self-converged.

    Torus sides retry up to five phase offsets when a node lands on a pole.
    NoConvergence propagates with its history.
    """
    if spec.n == 0:
        return SideResult(1.0 + 0j, ConvergenceHistory.exact(1.0))
    target = settings.target_for(spec.n)
    if isinstance(spec, IntervalSpec):
        start = settings.grid_start or DEFAULT_JACOBI_START
        val, hist = refine_until(spec.integrate, start, target, settings.max_level)
        return SideResult(val, hist)
    start = settings.grid_start or DEFAULT_TORUS_START[min(spec.n, 3)]
    last = None
    for offset in PHASE_OFFSETS:
        try:
            val, hist = refine_until(lambda N: spec.integrate(N, offset), start, target, settings.max_level)
            return SideResult(val, hist, offset)
        except PoleHit as exc:
            last = exc
    raise PoleHit(f"pole on every phase offset tried: {last}")


def gen_prod(f, lo: int, hi: int) -> complex:
    """prod_{i=lo}^{hi} f(i), extended to hi < lo - 1 by 1 / prod_{i=hi+1}^{lo-1} f(i)."""
    if hi >= lo - 1:
        return stable_prod([f(i) for i in range(lo, hi + 1)])
    return 1.0 / stable_prod([f(i) for i in range(hi + 1, lo)])


# -- reports ------------------------------------------------------------------


@dataclass
class VerificationReport:
    identity: IdentityKind
    dims: tuple
    lhs: complex
    rhs: complex
    rel_err: float
    abs_err: float
    lhs_history: ConvergenceHistory
    rhs_history: ConvergenceHistory
    passed: bool
    wall_time: float
    params: dict
    tol: float
    extra: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.lhs_history.converged and self.rhs_history.converged

    @property
    def grids(self) -> dict:
        return {"lhs": self.lhs_history.sizes, "rhs": self.rhs_history.sizes}


def default_tol(settings: QuadratureSettings, *dims) -> float:
    return 10 * max(settings.target_for(d) for d in dims if d > 0) if any(dims) else 1e-12


def compare(identity, dims, params, tol, started, lhs: SideResult, rhs: SideResult,
            extra=None) -> VerificationReport:
    rel = rel_diff(lhs.value, rhs.value)
    hist_ok = lhs.history.converged and rhs.history.converged
    return VerificationReport(
        identity=identity,
        dims=tuple(dims),
        lhs=complex(lhs.value),
        rhs=complex(rhs.value),
        rel_err=rel,
        abs_err=abs(lhs.value - rhs.value),
        lhs_history=lhs.history,
        rhs_history=rhs.history,
        passed=bool(rel < tol and hist_ok),
        wall_time=time.perf_counter() - started,
        params=to_flat(params),
        tol=tol,
        extra=dict(extra or {}),
    )


def scaled(side: SideResult, factor: complex) -> SideResult:
    """A side multiplied by a closed-form prefactor (history values scaled too)."""
    hist = ConvergenceHistory(side.history.target_rel, converged=side.history.converged)
    for e in side.history.entries:
        hist.entries.append(type(e)(e.size, e.value * factor, e.rel_change))
    return SideResult(side.value * factor, hist, side.phase_offset)


def grid_study(spec, levels: int, start: int | None = None, phase_offset: float = 0.5) -> list:
    """Value at ``levels`` successive doublings, without a stopping rule.

    Rows are (size, value, relative change from the previous level).
    """
    if isinstance(spec, IntervalSpec):
        start = start or DEFAULT_JACOBI_START
        run = spec.integrate
    else:
        start = start or DEFAULT_TORUS_START[min(max(spec.n, 1), 3)]
        run = lambda N: spec.integrate(N, phase_offset)  # noqa: E731
    rows, prev = [], None
    size = start
    for _ in range(levels):
        val = complex(run(size))
        rows.append((size, val, None if prev is None else rel_diff(val, prev)))
        prev = val
        size *= 2
    return rows
