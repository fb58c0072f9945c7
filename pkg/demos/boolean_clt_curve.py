"""Boolean central limit: the entropy curve t -> Gamma(mu_t).

Start from a centered, unit-variance law mu.  The semigroup mu_t rescales
the t-fold Boolean convolution power by 1/sqrt(t), and Gamma(mu_t) climbs
toward Gamma(Rademacher) = 0.  The slope at t = 1 has a closed form,
E[ell(X/Y)]/2 - 1, which we compare with a finite difference.

Run:  python3 demos/boolean_clt_curve.py
"""

import numpy as np

from boolent import laws
from boolent.booleanclt import gamma_curve, gamma_prime_1, gamma_prime_fd, standardize
from boolent.measures import Atomic, d_bl

ts = [1, 2, 4, 8, 16, 64]

# an exactly solvable base: mu_t stays atomic and is computed in closed form
two_atom = standardize(Atomic([-0.5, 2.0], [0.7, 0.3]))
print("two-atom base")
for t, g in gamma_curve(two_atom, ts):
    print(f"  t = {t:5g}   Gamma(mu_t) = {g: .6f}")
print(f"  slope at 1: identity {gamma_prime_1(two_atom):.5f}, "
      f"finite difference {gamma_prime_fd(two_atom, h=1e-4):.5f}")

# a continuous base: mu_t comes from Stieltjes inversion of G_t
sc = standardize(laws.semicircle())
print("semicircle base")
for t, g in gamma_curve(sc, ts):
    print(f"  t = {t:5g}   Gamma(mu_t) = {g: .6f}")
print(f"  slope at 1: identity {gamma_prime_1(sc):.5f}, finite difference {gamma_prime_fd(sc):.5f}")

# far along the semigroup the law is close to Rademacher
from boolent.booleanclt import SemigroupEvaluator  # noqa: E402

far = SemigroupEvaluator(sc, 1e4, tol=1e-6).measure()
print(f"d_BL(mu_1e4, Rademacher) = {d_bl(far, laws.rademacher()):.4f}")
print(f"mass of mu_1e4 within 0.1 of +-1: {np.sum(far.trapezoid_weights() * far.values * (np.abs(np.abs(far.x) - 1) < 0.1)):.3f}")
