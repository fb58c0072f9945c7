import numpy as np

from boolent.measures import Atomic, GridDensity


def random_centered_atomic(rng, kmax=4):
    """Random atomic measure with mean 0 and variance 1 (2..kmax atoms)."""
    k = int(rng.integers(2, kmax + 1))
    x = rng.normal(size=k) * 2
    w = rng.dirichlet(np.ones(k))
    x = x - np.dot(w, x)
    x = x / np.sqrt(np.dot(w, x * x))
    return Atomic(x, w, normalize=True)


def uniform_grid(lo, hi, dx=1e-3):
    """Uniform density on [lo, hi], with one zero node on each side."""
    n = int(round((hi - lo) / dx)) + 1
    vals = np.concatenate([[0.0], np.ones(n), [0.0]])
    return GridDensity(lo - dx, dx, vals)
