"""Closed-form reference laws.

Rademacher, ``mu_half = (delta_{-sqrt 2} + delta_{sqrt 2}) / 2``, the
semicircle, the Marchenko-Pastur law ``nu_gamma`` and the interpolating
family ``p_alpha`` between ``mu_half`` (``alpha -> 0``) and the semicircle
(``alpha = 1``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .measures import Atomic, GridDensity

SQRT2 = np.sqrt(2.0)
KINDS = ("rademacher", "mu-half", "semicircle", "mp", "p-alpha")


@dataclass(frozen=True)
class LawSpec:
    kind: str
    gamma: float | None = None
    alpha: float | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown law {self.kind!r}; expected one of {KINDS}")
        if self.kind == "mp":
            _check_unit("gamma", self.gamma)
        if self.kind == "p-alpha":
            _check_unit("alpha", self.alpha)


def _check_unit(name, v):
    if v is None or not 0 < v <= 1:
        raise DomainError(f"{name} must lie in (0, 1], got {v!r}")


# ----------------------------------------------------------------------
# densities
# ----------------------------------------------------------------------


def semicircle_density(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2 * np.pi)


def mp_edges(gamma):
    r = np.sqrt(gamma)
    return (1 - r) ** 2, (1 + r) ** 2


def mp_density(x, gamma):
    """Marchenko-Pastur density ``sqrt((t-a)(b-t)) / (2 pi gamma t)`` on ``[a, b]``.

    ``a, b = (1 -+ sqrt(gamma))**2``.  At ``gamma = 1`` the density blows up
    like ``t**-1/2`` at the origin; the value there is reported as ``inf``.
    """
    _check_unit("gamma", gamma)
    x = np.asarray(x, dtype=float)
    a, b = mp_edges(gamma)
    inside = (x >= a) & (x <= b) & (x > 0)
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = np.sqrt(np.clip((xi - a) * (b - xi), 0.0, None)) / (2 * np.pi * gamma * xi)
    if gamma == 1:
        out[x == 0] = np.inf
    return out


def p_alpha_edges(alpha):
    """Squared edges ``(a, b)`` of the support ``{a <= x**2 <= b}`` of ``p_alpha``."""
    _check_unit("alpha", alpha)
    r = 2 * np.sqrt(2 * alpha - alpha * alpha)
    return 2 - r, 2 + r


def p_alpha_density(x, alpha):
    """``sqrt((x**2 - a)(b - x**2)) / (2 pi alpha |x|)`` on ``a <= x**2 <= b``."""
    a, b = p_alpha_edges(alpha)
    x = np.asarray(x, dtype=float)
    if alpha == 1:
        # a = 0: the |x| cancels and the law is exactly the semicircle
        return semicircle_density(x)
    x2 = x * x
    inside = (x2 >= a) & (x2 <= b)
    out = np.zeros_like(x)
    xi = x2[inside]
    out[inside] = np.sqrt(np.clip((xi - a) * (b - xi), 0.0, None)) / (2 * np.pi * alpha * np.sqrt(xi))
    return out


def p_alpha_cauchy(z, alpha):
    """Closed-form Cauchy transform of ``p_alpha``.

    ``H(z) = (z**2 - 2(1 - alpha) - sqrt(z**2 - a) sqrt(z**2 - b)) / (2 alpha z)``
    with principal square roots of each factor; this branch behaves like
    ``z**2`` at infinity, so ``H(z) ~ 1/z``.
    """
    a, b = p_alpha_edges(alpha)
    z = np.asarray(z, dtype=complex)
    z2 = z * z
    root = np.sqrt(z2 - a) * np.sqrt(z2 - b)
    return (z2 - 2 * (1 - alpha) - root) / (2 * alpha * z)


def p_alpha_hilbert(x, alpha):
    """Hilbert transform of ``p_alpha`` inside its support: ``(x - 2(1-alpha)/x) / (2 alpha pi)``."""
    x = np.asarray(x, dtype=float)
    return (x - 2 * (1 - alpha) / x) / (2 * alpha * np.pi)


# ----------------------------------------------------------------------
# construction
# ----------------------------------------------------------------------


def support(spec):
    """Support as a list of closed intervals (degenerate for atoms)."""
    k = spec.kind
    if k == "rademacher":
        return [(-1.0, -1.0), (1.0, 1.0)]
    if k == "mu-half":
        return [(-SQRT2, -SQRT2), (SQRT2, SQRT2)]
    if k == "semicircle":
        return [(-2.0, 2.0)]
    if k == "mp":
        a, b = mp_edges(spec.gamma)
        return [(float(a), float(b))]
    a, b = p_alpha_edges(spec.alpha)
    lo, hi = float(np.sqrt(a)), float(np.sqrt(b))
    if lo == 0:
        return [(-hi, hi)]
    return [(-hi, -lo), (lo, hi)]


def default_grid(spec, dx=None):
    """A grid ``(x0, dx, count)`` covering the support with a small margin."""
    iv = support(spec)
    lo, hi = iv[0][0], iv[-1][1]
    if dx is None:
        dx = 1e-3
        if spec.kind == "p-alpha":
            a, b = p_alpha_edges(spec.alpha)
            width = np.sqrt(b) - np.sqrt(a)
            dx = min(1e-3, width / 2000)
        if spec.kind == "mp":
            a, b = mp_edges(spec.gamma)
            dx = min(1e-3, (b - a) / 2000)
    x0 = np.floor((lo - 0.05) / dx) * dx
    x1 = np.ceil((hi + 0.05) / dx) * dx
    if spec.kind == "mp":
        x0 = max(x0, 0.0)
    return float(x0), float(dx), int(round((x1 - x0) / dx)) + 1


def _mp_values(x, dx, gamma):
    vals = mp_density(x, gamma)
    if gamma == 1:
        # the density is ~ 1/(pi sqrt(t)) near 0; pick the node value so the
        # trapezoid on [0, dx] carries the exact mass 2 sqrt(dx)/pi
        vals[x == 0] = 3.0 / (np.pi * np.sqrt(dx))
    return vals


def make_law(spec, grid=None):
    """Build the measure for ``spec``; densities are sampled on ``grid``.

    ``grid = (x0, dx, count)``; atomic laws ignore it.  The trapezoid mass
    of the sampled density before renormalization is kept in ``raw_mass``.
    """
    k = spec.kind
    if k == "rademacher":
        return Atomic([-1.0, 1.0], [0.5, 0.5])
    if k == "mu-half":
        return Atomic([-SQRT2, SQRT2], [0.5, 0.5])
    if grid is None:
        grid = default_grid(spec)
    x0, dx, count = grid
    x = x0 + dx * np.arange(int(count))
    iv = support(spec)
    if x[0] > iv[0][0] + dx or x[-1] < iv[-1][1] - dx:
        raise DomainError(f"grid [{x[0]:.4g}, {x[-1]:.4g}] does not cover the support {iv}")
    if k == "semicircle":
        vals = semicircle_density(x)
    elif k == "mp":
        vals = _mp_values(x, dx, spec.gamma)
    else:
        vals = p_alpha_density(x, spec.alpha)
    return GridDensity(x0, dx, vals, meta={"law": k, "gamma": spec.gamma, "alpha": spec.alpha})


def rademacher():
    return make_law(LawSpec("rademacher"))


def mu_half():
    return make_law(LawSpec("mu-half"))


def semicircle(grid=None):
    return make_law(LawSpec("semicircle"), grid)


def marchenko_pastur(gamma, grid=None):
    return make_law(LawSpec("mp", gamma=gamma), grid)


def p_alpha(alpha, grid=None):
    return make_law(LawSpec("p-alpha", alpha=alpha), grid)
