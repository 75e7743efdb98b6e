"""
How far is IGPT from its asymptotic ratio?
==========================================

The asymptotic guarantee puts the greedy average at ``2 sqrt(p) / (p + 1)``
times ``E_max``.  At N = 2000 and k = 8 the measured ratio sits about 20%
lower.  Every greedy step maximizes ``N / k = 250`` fresh Gaussians whose
expected maximum is about 2.75, well short of ``sqrt(2 ln N) = 3.9``.  That
model reproduces the measurement.
"""

import math

from subtensor import experiments as ex
from subtensor.theory import ProblemParams, e_max, expected_max_gaussians

#%%

cfg = ex.ExperimentConfig(name="igpt-ratio", n=[2000], k=[8], p=[2, 3], trials=50, backend="implicit")
_, summary = ex.run_igpt_ratio(cfg)
for g in summary["grid"]:
    print(
        f"p={g['p']}: measured {g['mean_ratio']:.4f} +- {g['sd_ratio'] / math.sqrt(g['trials']):.4f}, "
        f"asymptotic {g['guarantee_ratio']:.4f}, finite-size model {g['finite_size_ratio']:.4f}"
    )

#%%
# The gap closes slowly: the block maximum approaches sqrt(2 ln(N/k)) and
# ln C(N, k) approaches k ln N only logarithmically.

for n in (10**3, 10**5, 10**7):
    b = n // 8
    print(n, round(expected_max_gaussians(b) / math.sqrt(2 * math.log(n)), 3),
          round(e_max(ProblemParams(n, 8, 2)) / math.sqrt(4 * math.log(n) / 8), 3))
