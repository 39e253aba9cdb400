import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, strategies as st

from ellint.errors import NoConvergence, NodeComputationFailure
from ellint.quadrature import (
    ConvergenceHistory,
    JacobiRule,
    TorusGrid,
    beta_function,
    classical_gamma,
    gauss_jacobi,
    jacobi_integrate,
    refine_until,
    rel_diff,
    torus_integrate,
    torus_integrate_factored,
    tree_sum,
)


def selberg_closed_form(n, a, b, g):
    """Selberg's integral over [0,1]^n with exponents a-1, b-1 and |x_i - x_j|^{2g}."""
    out = 1.0
    for j in range(n):
        out *= math.gamma(a + j * g) * math.gamma(b + j * g) * math.gamma(1 + (j + 1) * g)
        out /= math.gamma(a + b + (n + j - 1) * g) * math.gamma(1 + g)
    return out


# -- torus ------------------------------------------------------------------


@pytest.mark.parametrize("N", [8, 16, 33])
def test_discrete_orthogonality(N):
    grid = TorusGrid(1, N)
    z = grid.nodes()
    for k in range(-N + 1, N):
        val = tree_sum(z**k) / N
        assert abs(val - (k == 0)) < 1e-14


def test_torus_grid_points_lexicographic():
    g = TorusGrid(2, 4, 0.0)
    pts = g.points()
    assert pts.shape == (16, 2)
    assert np.allclose(pts[1], [1, 1j])
    assert np.allclose(pts[4], [1j, 1])
    assert g.refined().N == 8
    with pytest.raises(ValueError):
        TorusGrid(1, 2)


def test_torus_integrate_monomials():
    grid = TorusGrid(2, 12)
    assert torus_integrate(lambda z: z[:, 0] * z[:, 1] ** -1 + 3.0, grid) == pytest.approx(3.0)
    assert abs(torus_integrate(lambda z: z[:, 0] ** 2 * z[:, 1], grid)) < 1e-14


def test_torus_integrate_laurent_series():
    # 1/(1 - a z)(1 - a/z) has constant term 1/(1 - a^2)
    a = 0.4
    grid = TorusGrid(1, 64)
    val = torus_integrate(lambda z: 1 / ((1 - a * z[:, 0]) * (1 - a / z[:, 0])), grid)
    assert val == pytest.approx(1 / (1 - a * a), rel=1e-14)


def test_torus_integrate_worker_count_is_bit_identical():
    grid = TorusGrid(2, 150)
    f = lambda z: np.exp(z[:, 0] + 0.3 * z[:, 1] ** -2) / (2 - z[:, 0] * z[:, 1])  # noqa: E731
    vals = {w: torus_integrate(f, grid, workers=w) for w in (1, 2, 8)}
    assert vals[1] == vals[2] == vals[8]


def test_factored_matches_generic():
    N = 20
    grid = TorusGrid(3, N)
    z = grid.nodes()
    single = 1 / (1 - 0.3 * z) + z**-1
    pair = 2 + z[:, None] / z[None, :]
    f = lambda pts: (  # noqa: E731
        np.prod(1 / (1 - 0.3 * pts) + pts**-1, axis=1)
        * (2 + pts[:, 0] / pts[:, 1]) * (2 + pts[:, 0] / pts[:, 2]) * (2 + pts[:, 1] / pts[:, 2])
    )
    assert torus_integrate_factored(single, pair, 3) == pytest.approx(torus_integrate(f, grid), rel=1e-13)
    assert torus_integrate_factored(single, None, 0) == 1


def test_tree_sum_order_fixed():
    v = np.random.default_rng(0).normal(size=1001) * 1e10
    assert tree_sum(v) == tree_sum(v.copy())
    assert tree_sum([]) == 0


# -- gamma and Gauss-Jacobi ----------------------------------------------------


@pytest.mark.parametrize("x", [0.5, 1.0, 2.5, 7.3, -0.5, -3.7, 0.3 + 2j, 5 - 1j, 40.0])
def test_classical_gamma(x):
    assert classical_gamma(x) == pytest.approx(complex(sp.gamma(x)), rel=1e-13)


def test_beta_function():
    assert beta_function(2.5, 1.5) == pytest.approx(sp.beta(2.5, 1.5), rel=1e-14)


def test_gauss_jacobi_matches_scipy():
    x, w = gauss_jacobi(12, 0.3, -0.4)
    xs, ws = sp.roots_jacobi(12, 0.3, -0.4)
    assert np.allclose(x, xs, atol=1e-14)
    assert np.allclose(w, ws, rtol=1e-13)


def test_gauss_jacobi_complex_exponents_total_mass():
    A, B = 0.3 + 0.2j, 0.5 - 0.1j
    x, w = gauss_jacobi(10, A, B)
    mu0 = 2 ** (A + B + 1) * classical_gamma(A + 1) * classical_gamma(B + 1) / classical_gamma(A + B + 2)
    assert np.sum(w) == pytest.approx(mu0, rel=1e-12)
    # exact for analytic polynomial integrands: int (1-x)^A (1+x)^B (1+x) = 2 mu0 (B+1)/(A+B+2)
    assert np.sum(w * (1 + x)) == pytest.approx(2 * mu0 * (B + 1) / (A + B + 2), rel=1e-12)


def test_gauss_jacobi_failure():
    with pytest.raises(NodeComputationFailure):
        gauss_jacobi(5, -1.5, 0.0)


@given(st.floats(0.2, 3.0), st.floats(0.2, 3.0))
def test_jacobi_rule_reproduces_beta(alpha, beta):
    rule = JacobiRule(0.0, 1.0, alpha, beta, 8)
    val = jacobi_integrate(lambda x: np.ones(len(x)), rule, 1)
    assert val == pytest.approx(sp.beta(alpha, beta), rel=1e-12)


def test_jacobi_rule_on_shifted_interval():
    rule = JacobiRule(-1.0, 3.0, 1.5, 0.7, 10)
    val = jacobi_integrate(lambda x: x[:, 0] ** 2, rule, 1)
    from scipy.integrate import quad

    expect = quad(lambda x: (x + 1) ** 0.5 * (3 - x) ** -0.3 * x**2, -1, 3, limit=200)[0]
    assert val == pytest.approx(expect, rel=1e-9)


@pytest.mark.parametrize("a,b,g", [(1.0, 1.0, 1.0), (0.6, 1.4, 0.35), (1.7, 0.5, 0.8)])
def test_pair_weighted_selberg_integral(a, b, g):
    rule = JacobiRule(0.0, 1.0, a, b, 24)
    val = jacobi_integrate(lambda x: np.ones(len(x)), rule, 2, pair_exponent=2 * g)
    assert val == pytest.approx(selberg_closed_form(2, a, b, g), rel=1e-12)


def test_tensor_rule_three_dims():
    rule = JacobiRule(0.0, 1.0, 2.0, 1.0, 6)
    val = jacobi_integrate(lambda x: np.prod(x, axis=1), rule, 3)
    assert val == pytest.approx((1 / 3) ** 3, rel=1e-13)
    with pytest.raises(NotImplementedError):
        jacobi_integrate(lambda x: np.ones(len(x)), rule, 3, pair_exponent=1.0)


# -- refinement ----------------------------------------------------------------


def test_refine_until_converges():
    val, hist = refine_until(lambda N: 1 + 0.5**N, 4, 1e-8)
    assert hist.converged
    assert hist.sizes == [4, 8, 16, 32, 64]
    assert val == pytest.approx(1, abs=1e-15)
    assert hist.entries[0].rel_change is None


def test_refine_until_raises_with_history():
    with pytest.raises(NoConvergence) as exc:
        refine_until(lambda N: 1 / N, 4, 1e-12, max_level=3)
    hist = exc.value.history
    assert hist.sizes == [4, 8, 16, 32]
    assert not hist.converged


def test_history_rows_and_exact():
    h = ConvergenceHistory.exact(2 + 1j)
    assert h.converged and h.value == 2 + 1j
    assert h.to_rows() == [[0, 2.0, 1.0, 0.0]]
    assert rel_diff(0, 0) == 0
