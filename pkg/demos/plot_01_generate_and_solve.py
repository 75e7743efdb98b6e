"""
Generating an instance and solving it three ways
================================================

A seeded Gaussian tensor, the greedy block algorithm, alternating local
search, and the exact ground state on an instance small enough to enumerate.
"""

import numpy as np

from subtensor import brute_force_max, entry, generate_tensor, igpt, local_search
from subtensor.theory import ProblemParams, e_max

#%%
# Entries come from a counter-based hash of ``(seed, i_1, ..., i_p)``, so a
# dense array and the on-the-fly backend agree bit for bit.

dense = generate_tensor(12, 3, seed=42, backend="dense")
lazy = generate_tensor(12, 3, seed=42, backend="implicit")
print(entry(dense, (1, 2, 3)), entry(lazy, (1, 2, 3)))
print("backends identical:", np.array_equal(dense.block([np.arange(12)] * 3), lazy.block([np.arange(12)] * 3)))

#%%
# Solve for k = 2.  The exact optimum dominates both heuristics.

k = 2
best = brute_force_max(dense, k)
greedy = igpt(dense, k)
local = local_search(dense, k, seed=0)
em = e_max(ProblemParams(12, k, 3))
for res in (best, greedy, local):
    print(f"{res.algorithm:>12}: average {res.value_average:.4f} = {res.value_average / em:.3f} E_max  {res.solution.to_list()}")

#%%
# Local search stops at a point no single-axis replacement can improve.
# Its objective trace only goes up.

print(np.round(local.history, 4))
