"""One verifier per identity: both sides assembled from kernels and quadrature."""

from ..sampling import IdentityKind
from .basic import (
    bh1_limit_probe,
    bh1_sides,
    bh23_sides,
    elliptic_lift,
    lemma_products,
    lemma_sum,
    lemma_terms,
    verify_bh,
    verify_gamma_limits,
    verify_lemma_sym,
)
from .classical import classical_sides, verify_classical
from .core import (
    DEFAULT_SETTINGS,
    PHASE_OFFSETS,
    IntegrandSpec,
    IntervalSpec,
    QuadratureSettings,
    VerificationReport,
    grid_study,
    integrate_side,
)
from .elliptic import (
    dixon_sides,
    main_as_selberg,
    main_sides,
    selberg_eval_rhs,
    selberg_lhs_spec,
    selberg_transform_params,
    selberg_transform_prefactor,
    verify_dixon,
    verify_main,
    verify_selberg,
)

GAMMA_LIMIT_PROBE_P = 1e-3


def verify(identity: IdentityKind, params, tol=None, settings: QuadratureSettings = DEFAULT_SETTINGS):
    """Run the verifier matching ``identity`` on ``params``."""
    K = IdentityKind
    if identity in (K.DixonTransform, K.DixonEval):
        return verify_dixon(params, tol, settings)
    if identity in (K.SelbergEval, K.SelbergTransform):
        return verify_selberg(identity, params, tol, settings)
    if identity is K.MainTheorem:
        return verify_main(params, tol, settings)
    if identity is K.LemmaSym:
        return verify_lemma_sym(params.n, params, 1e-10 if tol is None else tol)
    if identity is K.BH1:
        return verify_bh(1, params, tol, settings)
    if identity is K.BH2:
        return verify_bh(2, params, tol, settings)
    if identity is K.BH3:
        return verify_bh(3, params, tol, settings)
    if identity in (K.ClassicalEuler, K.ClassicalContiguous):
        return verify_classical(identity, params, tol, settings)
    if identity is K.GammaLimitP0:
        return verify_gamma_limits(GAMMA_LIMIT_PROBE_P, params)
    raise ValueError(identity)


def sides_for(identity: IdentityKind, params):
    """(lhs spec, lhs prefactor, rhs spec or None, rhs prefactor) for quadrature identities."""
    K = identity.__class__
    if identity in (K.DixonTransform, K.DixonEval):
        return dixon_sides(params)
    if identity is K.MainTheorem:
        return main_sides(params)
    if identity is K.SelbergEval:
        spec, pre = selberg_lhs_spec(params)
        return spec, pre, None, selberg_eval_rhs(params)
    if identity is K.SelbergTransform:
        spec, pre = selberg_lhs_spec(params)
        rspec, rpre = selberg_lhs_spec(selberg_transform_params(params))
        return spec, pre, rspec, rpre * selberg_transform_prefactor(params)
    if identity is K.BH1:
        return bh1_sides(params)
    if identity in (K.BH2, K.BH3):
        return bh23_sides(params)
    if identity in (K.ClassicalEuler, K.ClassicalContiguous):
        return classical_sides(params)
    raise ValueError(f"{identity.value} involves no quadrature")


__all__ = [
    "IdentityKind",
    "IntegrandSpec",
    "IntervalSpec",
    "PHASE_OFFSETS",
    "QuadratureSettings",
    "VerificationReport",
    "bh1_limit_probe",
    "elliptic_lift",
    "grid_study",
    "integrate_side",
    "sides_for",
    "lemma_products",
    "lemma_sum",
    "lemma_terms",
    "main_as_selberg",
    "selberg_transform_params",
    "verify",
    "verify_bh",
    "verify_classical",
    "verify_dixon",
    "verify_gamma_limits",
    "verify_lemma_sym",
    "verify_main",
    "verify_selberg",
]
