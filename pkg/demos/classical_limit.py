"""q -> 1: Selberg-type integrals over a real interval.

Run with ``python demos/classical_limit.py``.
"""

# %%
# The weight prod x^(alpha0-1) (1-x)^(alpha1-1) |x - b|^(-tau) |Delta(x)|^(2 tau)
# is integrated by tensor Gauss-Jacobi rules; for n = 2 a split pair rule
# absorbs the |x1 - x2|^(2 tau) singularity.
from ellint.identities import IdentityKind, verify_classical
from ellint.identities.classical import classical_sides
from ellint.identities.core import grid_study
from ellint.sampling import sample_classical

params = sample_classical(2, "euler", seed=5)
print("alpha =", round(params.alpha0, 4), round(params.alpha1, 4), " b =", [round(b, 3) for b in params.b])

# %%
lspec, lpre, rspec, rpre = classical_sides(params)
for (size, lv, _), (_, rv, _) in zip(grid_study(lspec, 4, start=8), grid_study(rspec, 4, start=8)):
    lhs, rhs = lpre * lv, rpre * rv
    print(f"M={size:>3}  lhs={lhs.real:.15e}  rhs={rhs.real:.15e}  diff={abs(lhs - rhs):.1e}")

# %%
# The contiguous relation lowers the dimension by one.
for n in (1, 2):
    rep = verify_classical(IdentityKind.ClassicalContiguous, sample_classical(n, "contiguous", seed=5))
    print(f"contiguous n={n}: rel_err={rep.rel_err:.2e}")
