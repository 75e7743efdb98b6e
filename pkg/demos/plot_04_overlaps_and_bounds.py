"""
Overlap structure and the tail bounds behind the gap argument
=============================================================

Pairs of good solutions on correlated instances, then the Gaussian tail
inequalities and covariance facts used to bound them.
"""

import math

import numpy as np

from subtensor import experiments as ex
from subtensor.theory import (
    ProblemParams,
    build_covariance_model,
    lemma_checks,
    mvn_tail_bounds,
    ogp_exponent_psi,
)

#%%
# At k = 2 the per-axis overlaps can only be 0, 1/2 or 1.

cfg = ex.ExperimentConfig(name="ogp-scan", n=[10], k=[2], p=[3], gamma=0.6, taus=[0.0, math.pi / 4])
_, scan = ex.run_ogp_scan(cfg)
print(scan["qualifier_counts"])
print(scan["overlap_histogram"])

#%%
# Covariance of three solutions with pairwise overlaps near nu2 = 0.9 at p = 10.

model = build_covariance_model(3, 10, 0.85, 0.9, "random", seed=1)
for r in lemma_checks(model):
    print(f"{r.name:<36} {r.exact_or_mc!s:<24} ok={r.satisfied} hypothesis={r.precondition}")

#%%
# Savage-type bounds bracket the joint tail of the equicorrelated model.

sigma = np.array(build_covariance_model(3, 10, 0.85, 0.9, "zero").sigma)
lo, up = mvn_tail_bounds(sigma, np.full(3, 2.0))
rng = np.random.default_rng(0)
x = rng.standard_normal((10**6, 3)) @ np.linalg.cholesky(sigma).T
print(lo, (x >= 2).all(axis=1).mean(), up)

#%%
# The first-moment exponent only turns negative once 4 p nu2^p is small.
# With nu2 = 0.99 that needs p close to a thousand.

for p in (10, 100, 500, 1000, 1500):
    print(p, round(ogp_exponent_psi(ProblemParams(1000, 100, p), 2, 0.9, 0.97, 0.99), 4))
