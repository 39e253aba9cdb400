"""From elliptic to basic: the p -> 0 limit of the transformation.

Run with ``python demos/basic_limit.py``.
"""

# %%
# Elliptic gamma factors tend to q-Pochhammer ratios as p -> 0:
# Gamma(z; p, q) -> 1 / (z; q) with a first-order gap.
from ellint.qseries import elliptic_gamma, qpochhammer

z, q = 0.6 + 0.3j, 0.3
limit = 1 / qpochhammer(z, q)
for p in (1e-1, 1e-2, 1e-3, 1e-4):
    gap = abs(elliptic_gamma(z, p, q) - limit) / abs(limit)
    print(f"p={p:7.0e}  gap={gap:.3e}  gap/p={gap / p:.3f}")

# %%
# The same holds for whole integrals. Lift a basic parameter set to nome p
# (v pairs completed by pq / (t v)) and compare left sides.
from ellint.identities import bh1_limit_probe, verify_bh
from ellint.sampling import sample_bh1

params = sample_bh1(1, 1, k=2, seed=4)
for p, value, gap in bh1_limit_probe(params, p_values=(1e-2, 1e-3, 1e-4)):
    print(f"p={p:7.0e}  elliptic lhs={value:.12f}  rel gap={gap:.2e}")

# %%
# At p = 0 itself the basic identity holds exactly.
rep = verify_bh(1, params)
print("basic identity rel_err", f"{rep.rel_err:.2e}")
