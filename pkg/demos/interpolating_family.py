"""The family p_alpha between mu_1/2 (alpha -> 0) and the semicircle (alpha = 1).

p_alpha minimizes alpha I_1 + (1 - alpha) I_2.  For each alpha we print the
support, the second and fourth moments, the normalized rate at p_alpha and
the Euler-Lagrange residual of its log potential.

Run:  python3 demos/interpolating_family.py
"""

import numpy as np

from boolent import entropy, laws
from boolent.measures import moment

print(" alpha   support            m2      m4      I_alpha    EL max_dev  EL slack")
for alpha in (0.05, 0.25, 0.5, 0.75, 1.0):
    d = laws.p_alpha(alpha)
    a, b = laws.p_alpha_edges(alpha)
    rate = entropy.rate_ialpha(d, alpha).normalized
    el = entropy.euler_lagrange_residual(d, alpha)
    print(f" {alpha:4.2f}   [{np.sqrt(a):.3f}, {np.sqrt(b):.3f}]   {moment(d, 2):.4f}  {moment(d, 4):.4f}"
          f"  {rate: .1e}   {el.max_dev:.1e}     {el.min_slack:.1e}")

# a law that is not the minimizer fails the equilibrium test
el = entropy.euler_lagrange_residual(laws.semicircle(), 0.5)
print(f"semicircle at alpha = 0.5: max_dev {el.max_dev:.3f} (not an equilibrium)")
