"""Samplers, rate functions and the weight-ratio check.

1. Wishart block: singular values of G/sqrt(2n) pile up at 1, so the
   reflected measure approaches Rademacher and the normalized J+ rate of
   the sample is small.
2. Conditioned GUE: the M surviving eigenvalues sit near +-sqrt 2 with a
   random split; the normalized rate I vanishes on every such split.
3. Weight ratios: the log-density ratio of two quantile configurations,
   divided by the speed, predicts the rate difference of their targets.

Run:  python3 demos/random_matrix_rates.py
"""

import numpy as np

from boolent import ensembles as ens
from boolent import entropy, verify
from boolent.measures import GridDensity, d_bl, moment, rademacher, symmetrize


def uniform(lo, hi, dx=1e-4):
    x = np.arange(lo - dx, hi + 2 * dx, dx)
    return GridDensity(lo - dx, dx, ((x >= lo - 1e-12) & (x <= hi + 1e-12)).astype(float))


sv, refl = ens.sample_wishart_block(ens.EnsembleConfig(ens.WishartBlock(30, 3000), seed=1))
print("Wishart block p=30, n=3000")
print(f"  d_BL(reflected, Rademacher) = {d_bl(refl, rademacher()):.4f}")
print(f"  normalized J+ of the singular values = {entropy.rate_jplus(sv).normalized:.5f}")

L = ens.sample_conditioned_gue(ens.EnsembleConfig(ens.ConditionedGUE(20, 1000), seed=1))
dist, p = verify.distance_to_m0(L)
print("conditioned GUE M=20, N=1000")
print(f"  m2 = {moment(L, 2):.4f}, m4 = {moment(L, 4):.4f}  (mu_1/2: 2, 4)")
print(f"  distance to p delta_sqrt2 + (1-p) delta_-sqrt2: {dist:.4f} at p = {p:.3f}")
print(f"  normalized I = {entropy.rate_i(L).normalized:.5f}")
pair, a, b = ens.scaled_pair(L.points, 20, 1000)
print(f"  scaled pair: mass(alpha) = {a.mass:.2f}, pair rate = {entropy.rate_pair(a, b).normalized:.4f}")

print("weight ratio vs rate difference")
wm = verify.WeightModel.wishart_singular(40, 4000)
meas, pred = verify.ldp_weight_ratio_check(wm, uniform(0.9, 1.1), uniform(1.9, 2.1))
print(f"  Wishart (40, 4000): measured {meas:.4f}, predicted {pred:.4f}")
wm = verify.WeightModel.conditioned_gue(40, 4000)
meas, pred = verify.ldp_weight_ratio_check(wm, symmetrize(uniform(1.3, 1.5)), symmetrize(uniform(2.3, 2.5)))
print(f"  conditioned GUE (40, 4000): measured {meas:.4f}, predicted {pred:.4f}")
