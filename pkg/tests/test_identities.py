import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ellint.errors import NoConvergence, PoleHit
from ellint.identities import (
    IdentityKind,
    QuadratureSettings,
    grid_study,
    integrate_side,
    lemma_products,
    lemma_terms,
    main_as_selberg,
    sides_for,
    verify,
    verify_bh,
    verify_classical,
    verify_dixon,
    verify_gamma_limits,
    verify_lemma_sym,
    verify_main,
    verify_selberg,
)
from ellint.identities.core import IntegrandSpec, gen_prod, qpoch
from ellint.identities.elliptic import (
    selberg_lhs_spec,
    selberg_transform_params,
    selberg_transform_prefactor_cross,
)
from ellint.kernels import KernelKind
from ellint.qseries import Nome, elliptic_gamma
from ellint.sampling import (
    conjugate,
    sample_bh1,
    sample_bh2,
    sample_classical,
    sample_dixon,
    sample_for,
    sample_gamma_limit,
    sample_lemma,
    sample_main,
    sample_selberg,
)
from dataclasses import replace


def side_value(identity, params, which="lhs"):
    lspec, lpre, rspec, rpre = sides_for(identity, params)
    if which == "lhs":
        return lpre * integrate_side(lspec).value
    return rpre * (1 if rspec is None else integrate_side(rspec).value)


# -- small cases of each verifier --------------------------------------------------


@pytest.mark.parametrize("m", [0, 1])
def test_dixon(m):
    rep = verify_dixon(sample_dixon(1, m, 4), tol=1e-8)
    assert rep.passed and rep.rel_err < 1e-10
    assert rep.identity is (IdentityKind.DixonEval if m == 0 else IdentityKind.DixonTransform)


def test_dixon_branch_flip_is_harmless():
    params = sample_dixon(1, 1, 2)
    a = verify_dixon(params, sqrt_sign=1)
    b = verify_dixon(params, sqrt_sign=-1)
    assert a.passed and b.passed
    assert abs(a.rel_err - b.rel_err) < 1e-10


def test_selberg_evaluation():
    rep = verify_selberg(IdentityKind.SelbergEval, sample_selberg(1, False, 0))
    assert rep.passed and rep.rel_err < 1e-10


def test_selberg_transform_and_involution():
    params = sample_selberg(1, True, 5)
    assert verify_selberg("selberg-transform", params).passed
    back = selberg_transform_params(selberg_transform_params(params))
    assert np.allclose(back.t_r, params.t_r, rtol=1e-14)


def test_selberg_evaluation_needs_t_power_gammas():
    # dropping prod_j Gamma(t^j) from the closed form leaves an O(1) mismatch
    params = sample_selberg(1, False, 1)
    lhs = side_value(IdentityKind.SelbergEval, params)
    rhs = side_value(IdentityKind.SelbergEval, params, "rhs")
    bare = rhs / elliptic_gamma(params.t, params.nome.p, params.nome.q)
    assert abs(lhs - rhs) / abs(rhs) < 1e-10
    assert abs(lhs - bare) / abs(lhs) > 1e-2


def test_selberg_transform_cross_prefactor_fails():
    params = sample_selberg(1, True, 3)
    spec, pre = selberg_lhs_spec(params)
    lhs = pre * integrate_side(spec).value
    rspec, rpre = selberg_lhs_spec(selberg_transform_params(params))
    wrong = rpre * selberg_transform_prefactor_cross(params) * integrate_side(rspec).value
    assert abs(lhs - wrong) / abs(lhs) > 1e-2


@pytest.mark.parametrize("nm", [(1, 0), (1, 1), (0, 1), (1, 2)])
def test_main(nm):
    rep = verify_main(sample_main(*nm, 6))
    assert rep.passed, rep.rel_err
    assert rep.dims == (nm[0], nm[1], nm[0] + nm[1])


def test_main_one_zero_is_the_selberg_integral():
    params = sample_main(1, 0, 8)
    a = side_value(IdentityKind.MainTheorem, params)
    b = side_value(IdentityKind.SelbergEval, main_as_selberg(params))
    assert abs(a - b) / abs(b) < 1e-12
    with pytest.raises(ValueError):
        main_as_selberg(sample_main(1, 1, 0))


def test_main_left_side_permutation_invariant():
    params = sample_main(1, 1, 9)
    base = side_value(IdentityKind.MainTheorem, params)
    perm = replace(params, t_r=params.t_r[::-1], v_r=params.v_r[2:] + params.v_r[:2])
    assert abs(side_value(IdentityKind.MainTheorem, perm) - base) / abs(base) < 1e-12


def test_main_conjugation_symmetry():
    params = sample_main(1, 1, 10)
    a = verify_main(params)
    b = verify_main(conjugate(params))
    assert abs(a.lhs.conjugate() - b.lhs) / abs(a.lhs) < 1e-12
    assert abs(a.rhs.conjugate() - b.rhs) / abs(a.rhs) < 1e-12


@pytest.mark.parametrize("k", [1, 2])
def test_bh1(k):
    assert verify_bh(1, sample_bh1(1, 1, k, 3)).passed


@pytest.mark.parametrize("which", [2, 3])
def test_bh23(which):
    rep = verify_bh(which, sample_bh2(1, 1, 5, which=which))
    assert rep.passed, rep.rel_err


def test_bh_type_checks():
    with pytest.raises(TypeError):
        verify_bh(2, sample_bh1(1, 1, 2, 0))
    with pytest.raises(ValueError):
        verify_bh(4, sample_bh1(1, 1, 2, 0))


@pytest.mark.parametrize("which", ["euler", "contiguous"])
@pytest.mark.parametrize("n", [1, 2])
def test_classical(which, n):
    kind = IdentityKind.ClassicalEuler if which == "euler" else IdentityKind.ClassicalContiguous
    rep = verify_classical(kind, sample_classical(n, which, 2))
    assert rep.passed, rep.rel_err


def test_classical_kind_mismatch():
    with pytest.raises(ValueError):
        verify_classical(IdentityKind.ClassicalEuler, sample_classical(1, "contiguous", 0))


# -- theta-sum lemma ---------------------------------------------------------------


@given(st.integers(0, 10_000), st.integers(1, 4))
@settings(max_examples=25)
def test_lemma_sum_matches_products(seed, n):
    params = sample_lemma(n, seed)
    rep = verify_lemma_sym(n, params)
    assert rep.passed, (rep.rel_err, rep.extra["forms_rel_err"])
    assert len(lemma_terms(params)) == 2**n


def test_lemma_terms_symmetric_in_z():
    params = sample_lemma(3, 4)
    a = np.sum(lemma_terms(params))
    b = np.sum(lemma_terms(replace(params, z=params.z[::-1])))
    assert abs(a - b) < 1e-12 * np.sum(np.abs(lemma_terms(params)))


def test_lemma_against_mpmath_theta():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 30
    params = sample_lemma(2, 11)
    p = mp.mpc(params.p)

    def th(x):
        return mp.qp(x, p) * mp.qp(p / x, p)

    total = 0
    for s1 in (1, -1):
        for s2 in (1, -1):
            z1, z2 = mp.mpc(params.z[0]) ** s1, mp.mpc(params.z[1]) ** s2
            num = th(params.t * z1 * z2)
            den = th(z1 * z2) * th(z1**2) * th(z2**2)
            for zz in (z1, z2):
                for u in params.u:
                    num *= th(u * zz)
            total += num / den
    first, _ = lemma_products(params)
    assert abs(complex(total) - first) / abs(first) < 1e-12


# -- gamma limits -------------------------------------------------------------------


def test_gamma_limit_exact_at_zero():
    assert verify_gamma_limits(0.0, sample_gamma_limit(1)).passed


@pytest.mark.parametrize("p", [1e-2, 1e-3])
def test_gamma_limit_first_order(p):
    rep = verify_gamma_limits(p, sample_gamma_limit(2))
    assert rep.passed
    assert rep.extra["gap"] > 0


def test_gamma_limit_probe_range():
    with pytest.raises(ValueError):
        verify_gamma_limits(0.5, sample_gamma_limit(0))


# -- shared machinery ---------------------------------------------------------------


def test_gen_prod():
    f = lambda i: i + 1.0  # noqa: E731
    assert gen_prod(f, 1, 3) == 2 * 3 * 4
    assert gen_prod(f, 3, 2) == 1
    assert gen_prod(f, 3, 0) == pytest.approx(1 / (2 * 3))


def test_phase_offset_retry():
    nome = Nome(0.0, 0.2)
    c = np.exp(-1j * np.pi / 64)  # c times the first N=64 node (offset 0.5) is exactly 1
    spec = IntegrandSpec(KernelKind.TildeDeltaAII, 1, nome, 0.3,
                         (qpoch(c), qpoch(c, power=-1)))
    with pytest.raises(PoleHit):
        spec.integrate(64, 0.5)
    side = integrate_side(spec)
    assert side.phase_offset == 0.25
    assert side.value == pytest.approx(1.0, abs=1e-14)


def test_grid_study_constant_integrand():
    spec = IntegrandSpec(KernelKind.TildeDeltaAII, 1, Nome(0.0, 0.2), 0.3, ())
    rows = grid_study(spec, 3, start=8)
    assert [r[0] for r in rows] == [8, 16, 32]
    assert all(r[1] == rows[0][1] for r in rows)
    assert rows[0][2] is None and rows[1][2] == 0


def test_no_convergence_surfaces_history():
    params = sample_main(1, 1, 0)
    with pytest.raises(NoConvergence) as exc:
        verify_main(params, settings=QuadratureSettings(target_rel=1e-30, grid_start=8, max_level=1))
    assert exc.value.history.sizes == [8, 16]


def test_dispatcher_covers_every_identity():
    dims = {IdentityKind.DixonEval: (1, 0), IdentityKind.SelbergEval: (1,),
            IdentityKind.SelbergTransform: (1,), IdentityKind.LemmaSym: (2,)}
    for kind in IdentityKind:
        params = sample_for(kind, dims.get(kind, (1, 1)), 0)
        rep = verify(kind, params)
        assert rep.identity is kind
        assert rep.passed, (kind, rep.rel_err)
