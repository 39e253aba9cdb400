"""Elliptic beta integral: watch the uniform rule converge geometrically.

Run with ``python demos/elliptic_beta_convergence.py``.
"""

# %%
# Draw one admissible six-parameter point. The balancing condition
# t_1 ... t_6 = pq holds to rounding; every modulus sits below 0.75.
import numpy as np

from ellint.identities import IdentityKind, grid_study, verify_selberg
from ellint.identities.elliptic import selberg_eval_rhs, selberg_lhs_spec
from ellint.sampling import sample_selberg

params = sample_selberg(1, transform=False, seed=3)
print("p, q      =", params.nome.p, params.nome.q)
print("|t_r|     =", np.round(np.abs(params.t_r), 3))
print("balancing =", abs(np.prod(params.t_r) / params.nome.pq - 1))

# %%
# The integrand is analytic on an annulus around |z| = 1, so the N-point
# rule errs like rho^N. Each doubling should square the error.
spec, pre = selberg_lhs_spec(params)
exact = selberg_eval_rhs(params)
print(f"{'N':>5} {'relative error':>16}")
for size, value, _ in grid_study(spec, levels=5, start=8):
    print(f"{size:>5} {abs(pre * value - exact) / abs(exact):16.3e}")

# %%
# The verifier runs the same refinement with a stopping rule.
rep = verify_selberg(IdentityKind.SelbergEval, params)
print("rel_err", f"{rep.rel_err:.2e}", "grids", rep.grids["lhs"], "passed", rep.passed)
