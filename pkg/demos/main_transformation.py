"""The n-dimensional to m-dimensional transformation of elliptic Selberg integrals.

Run with ``python demos/main_transformation.py`` (about ten seconds).
"""

# %%
from ellint.identities import QuadratureSettings, verify_main
from ellint.errors import Infeasible
from ellint.sampling import sample_main

# %%
# Each (n, m) pair uses its own balancing t0 t1 t2 t3 = t^(2+m-n)
# and k = n + m pairs of v's with v_{2i} v_{2i+1} = pq/t.
settings = QuadratureSettings(target_rel=1e-7)
print(f"{'(n,m)':>6} {'lhs':>40} {'rel_err':>10} {'grid':>6}")
for n, m in [(1, 0), (0, 1), (1, 1), (1, 2), (2, 1)]:
    rep = verify_main(sample_main(n, m, seed=1), settings=settings)
    print(f"{str((n, m)):>6} {rep.lhs:40.15g} {rep.rel_err:10.2e} {rep.grids['lhs'][-1]:>6}")

# %%
# When n - m >= 2 the balancing forces prod |t_r| = |t|^(2+m-n) >= 1,
# which no point with |t_r| < 1 satisfies. The sampler says so.
try:
    sample_main(2, 0, seed=0)
except Infeasible as exc:
    print("(2,0):", exc)
