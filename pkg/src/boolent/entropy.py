"""Entropies and rate functionals.

* Boolean entropy ``Gamma(mu) = int log x**2 dmu``
* free entropy ``Sigma(mu) = iint log|x - y| dmu dmu``
* classical entropy ``S(mu) = -int f log f``

and the rate functionals built from them.  Every rate is reported both raw
(as the formula reads) and normalized by its infimum, see :class:`RateReport`.

Grid densities are integrated through the closed-form product rules of
:mod:`boolent._quad`, which absorb the logarithmic singularities exactly.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize

from . import _quad, laws
from .errors import DomainError
from .measures import GridDensity, moment

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class RateReport:
    name: str
    raw: float
    normalizer: float
    normalized: float
    params: dict = field(default_factory=dict)

    @classmethod
    def build(cls, name, raw, normalizer, *, excess=None, **params):
        """``excess``, when given, is an accurate value of ``raw - normalizer``."""
        raw = float(raw)
        normalizer = float(normalizer)
        normalized = raw - normalizer
        if excess is not None and abs(float(excess) - normalized) <= 1e-12 * max(1.0, abs(raw)):
            normalized = float(excess)
        return cls(name, raw, normalizer, normalized, params)

    def to_dict(self):
        return {
            "name": self.name,
            "raw": self.raw,
            "normalizer": self.normalizer,
            "normalized": self.normalized,
            "params": dict(self.params),
        }

    def to_json(self):
        return json.dumps(self.to_dict())


# ----------------------------------------------------------------------
# entropies
# ----------------------------------------------------------------------


def log_potential(d, x):
    """``U(x) = int log|x - y| d(y) dy`` for a grid density."""
    return _quad.log_potential(d.x0, d.dx, d.values, x)


def gamma_entropy(m):
    """Boolean entropy ``int log x**2 dm``.

    Returns ``-inf`` (with a warning) when an atom sits at the origin.
    """
    if isinstance(m, GridDensity):
        return float(2.0 * log_potential(m, 0.0))
    x, w = m.atoms()
    if np.any(x[w > 0] == 0):
        warnings.warn("atom at 0: Boolean entropy is -inf", RuntimeWarning, stacklevel=2)
        return -math.inf
    return float(np.dot(w, 2.0 * np.log(np.abs(x))))


def log_abs_mean(m):
    """``int log|x| dm`` (half the Boolean entropy)."""
    g = gamma_entropy(m)
    return 0.5 * g


def sigma_entropy(m):
    """Free entropy ``iint log|x - y| dm dm``; ``-inf`` for atomic measures."""
    if not isinstance(m, GridDensity):
        return -math.inf
    U = _quad.log_potential_nodes(m.x0, m.dx, m.values)
    return float(np.dot(m.trapezoid_weights() * m.values, U))


def classical_entropy(d):
    """``-int f log f dx`` with ``0 log 0 = 0`` (trapezoid rule)."""
    if not isinstance(d, GridDensity):
        raise DomainError("classical entropy is defined for densities only")
    f = d.values
    with np.errstate(divide="ignore", invalid="ignore"):
        flogf = np.where(f > 0, f * np.log(np.where(f > 0, f, 1.0)), 0.0)
    return float(-np.dot(d.trapezoid_weights(), flogf))


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------


def _has_atom_at_zero(m):
    if isinstance(m, GridDensity):
        return False
    x, w = m.atoms()
    return bool(np.any(x[w > 0] == 0))


def _positive_part_only(m, what):
    x, w = m.atoms()
    if np.any(x[w > 0] < 0) or (not isinstance(m, GridDensity) and np.any(x[w > 0] <= 0)):
        raise DomainError(f"{what} requires a measure on (0, inf)")


def _require_symmetric(m, tol=1e-8):
    for k in (1, 3, 5):
        if abs(moment(m, k)) > tol:
            raise DomainError(f"measure is not symmetric (moment {k} = {moment(m, k):.3g})")


def _require_density(m, what):
    if not isinstance(m, GridDensity):
        raise DomainError(f"{what} needs a grid density")


# ----------------------------------------------------------------------
# rate functionals
# ----------------------------------------------------------------------


def _sq_minus(x, c):
    # x**2 - c with the rounding error of x**2 restored (Dekker two-product),
    # so the result is accurate even when x**2 is within an ulp of c
    x = np.asarray(x, dtype=float)
    p = x * x
    t = 134217729.0 * x
    hi = t - (t - x)
    lo = x - hi
    err = ((hi * hi - p) + 2 * hi * lo) + lo * lo
    return (p - c) + err


def _atomic_excess(m, u):
    # int (u - log(1 + u)) dm, where u(x) = 0 at the pointwise minimizer; this
    # is the integrand minus its minimum, computed without cancellation
    if isinstance(m, GridDensity):
        return None
    x, w = m.atoms()
    uu = u(x)
    return float(np.dot(w, _u_minus_log1p(uu)))


def _u_minus_log1p(u):
    # u - log(1 + u) >= 0; the series u^2/2 - u^3/3 + ... near 0
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 0.1
    us = np.where(small, u, 0.0)
    acc = np.zeros_like(us)
    for k in range(18, 1, -1):
        acc = us * (acc + (-1) ** k / k)
    acc = acc * us
    with np.errstate(divide="ignore"):
        direct = u - np.log1p(np.where(small, 0.0, u))
    return np.where(small, acc, direct)


def rate_isym(m):
    """``int (x**2 - log x**2) dm`` on symmetric measures; infimum 1 (Rademacher)."""
    _require_symmetric(m)
    if _has_atom_at_zero(m):
        return RateReport.build("Isym", math.inf, 1.0)
    return RateReport.build("Isym", moment(m, 2) - gamma_entropy(m), 1.0,
                            excess=_atomic_excess(m, lambda x: _sq_minus(x, 1.0)))


def rate_i(m):
    """``int (x**2/2 - log x**2) dm``; infimum ``1 - log 2`` on ``{p delta_sqrt2 + (1-p) delta_-sqrt2}``."""
    if _has_atom_at_zero(m):
        return RateReport.build("I", math.inf, 1.0 - LOG2)
    return RateReport.build("I", 0.5 * moment(m, 2) - gamma_entropy(m), 1.0 - LOG2,
                            excess=_atomic_excess(m, lambda x: 0.5 * _sq_minus(x, 2.0)))


def rate_jplus(m):
    """``int (x**2 - log x**2) dm`` on ``(0, inf)``; infimum 1 at ``delta_1``."""
    _positive_part_only(m, "J+")
    return RateReport.build("Jplus", moment(m, 2) - gamma_entropy(m), 1.0,
                            excess=_atomic_excess(m, lambda x: _sq_minus(x, 1.0)))


def rate_jtilde(m):
    """``int (x - log x) dm`` on ``(0, inf)``; infimum 1 at ``delta_1``."""
    _positive_part_only(m, "J~+")
    return RateReport.build("Jtilde", moment(m, 1) - log_abs_mean(m), 1.0,
                            excess=_atomic_excess(m, lambda x: x - 1.0))


def _jgamma_raw(m, gamma):
    m1 = moment(m, 1)
    sigma = sigma_entropy(m)
    if gamma == 1:
        return m1 - sigma
    return gamma * (m1 - sigma) + (1 - gamma) * (m1 - log_abs_mean(m))


@lru_cache(maxsize=64)
def jgamma_infimum(gamma):
    """``J_gamma`` raw value at the Marchenko-Pastur minimizer ``nu_gamma``."""
    spec = laws.LawSpec("mp", gamma=gamma)
    a, b = laws.mp_edges(gamma)
    dx = min(2e-4, (b - a) / 4000)
    x0, _, count = laws.default_grid(spec, dx=dx)
    return _jgamma_raw(laws.make_law(spec, (x0, dx, count)), gamma)


def rate_jgamma(m, gamma):
    """``gamma (int x - Sigma) + (1 - gamma) int (x - log x)``, normalized at ``nu_gamma``."""
    if not 0 < gamma <= 1:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma!r}")
    _positive_part_only(m, "J_gamma")
    inf_ = jgamma_infimum(float(gamma))
    if not isinstance(m, GridDensity):
        return RateReport.build("Jgamma", math.inf, inf_, gamma=gamma)
    return RateReport.build("Jgamma", _jgamma_raw(m, gamma), inf_, gamma=gamma)


def _ialpha_raw(m, alpha):
    # alpha * iint F + (1 - alpha) * int G, F = (x**2 + y**2)/4 - log|x - y|,
    # G = x**2/2 - log x**2
    return 0.5 * moment(m, 2) - alpha * sigma_entropy(m) - (1 - alpha) * gamma_entropy(m)


@lru_cache(maxsize=64)
def ialpha_infimum(alpha):
    """``c_alpha``: the raw ``I_alpha`` at its minimizer ``p_alpha``."""
    spec = laws.LawSpec("p-alpha", alpha=alpha)
    a, b = laws.p_alpha_edges(alpha)
    dx = min(2e-4, (np.sqrt(b) - np.sqrt(a)) / 4000)
    return _ialpha_raw(laws.make_law(spec, laws.default_grid(spec, dx=dx)), alpha)


def rate_ialpha(m, alpha):
    """``alpha I_1 + (1 - alpha) I_2`` with infimum ``c_alpha`` attained at ``p_alpha``."""
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    c = ialpha_infimum(float(alpha))
    if not isinstance(m, GridDensity):
        return RateReport.build("Ialpha", math.inf, c, alpha=alpha)
    return RateReport.build("Ialpha", _ialpha_raw(m, alpha), c, alpha=alpha)


def potential_infimum(V, gamma, domain):
    """Infimum of ``V(x) - gamma log|x|`` over ``domain``: dense scan, then Brent refinement."""
    lo, hi = domain
    xs = np.linspace(lo, hi, 20001)
    xs = xs[xs != 0] if gamma > 0 else xs
    vals = np.asarray(V(xs), dtype=float) - (gamma * np.log(np.abs(xs)) if gamma > 0 else 0.0)
    i = int(np.argmin(vals))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, xs.size - 1)]
    if gamma > 0 and a < 0 < b:
        a, b = (a, -1e-300) if xs[i] < 0 else (1e-300, b)

    def h(x):
        return float(V(np.array([x]))[0]) - (gamma * math.log(abs(x)) if gamma > 0 else 0.0)

    best = vals[i]
    if b > a:
        res = optimize.minimize_scalar(h, bounds=(a, b), method="bounded", options={"xatol": 1e-12})
        best = min(best, res.fun)
    return float(best)


def rate_igamma_v(m, gamma, V, domain=None):
    """``int (V(x) - gamma log|x|) dm`` minus the pointwise infimum of the integrand.

    ``V`` is a vectorized callable.  The infimum is searched over ``domain``
    (default: ``[-R, R]`` with ``R`` = max(10, twice the support radius)).
    """
    if gamma < 0:
        raise DomainError("gamma must be nonnegative")
    if domain is None:
        lo, hi = m.support_hull()
        R = max(10.0, 2 * max(abs(lo), abs(hi)))
        domain = (-R, R)
    c = potential_infimum(V, gamma, domain)
    if gamma > 0 and _has_atom_at_zero(m):
        return RateReport.build("IgammaV", math.inf, c, gamma=gamma)
    x, w = m.atoms()
    raw = float(np.dot(w, np.asarray(V(x), dtype=float)))
    if gamma > 0:
        raw -= gamma * log_abs_mean(m)
    return RateReport.build("IgammaV", raw, c, gamma=gamma)


def rate_pair(a, b):
    """Pair rate ``int x**2 da + int x**2 db - 2 mass(a) mass(b)``; infimum ``-1/2``.

    ``a`` and ``b`` are :class:`~boolent.measures.SubMeasure` objects whose
    masses add up to one.
    """
    if abs(a.mass + b.mass - 1.0) > 1e-9:
        raise DomainError(f"pair masses must add to 1, got {a.mass} + {b.mass}")
    raw = a.moment(2) + b.moment(2) - 2.0 * a.mass * b.mass
    return RateReport.build("Ipair", raw, -0.5)


# ----------------------------------------------------------------------
# Euler-Lagrange residual
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ELResidual:
    max_dev: float
    min_slack: float
    constant: float


def euler_lagrange_residual(d, alpha, probe=None):
    """Check the equilibrium condition of ``I_alpha`` for a grid density.

    With ``phi(x) = 2 alpha U(x) - (x**2/2 - (1 - alpha) log x**2)``, the
    minimizer has ``phi`` constant on its support and no larger off it.
    Returns the largest deviation of ``phi`` from its support average on the
    support, and the smallest ``average - phi`` off the support.

    ``probe`` defaults to 1601 points spanning the support hull plus one
    unit on either side; the origin is skipped.
    """
    _require_density(d, "euler_lagrange_residual")
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    pos = np.nonzero(d.values > 0)[0]
    lo, hi = d.x[pos[0]], d.x[pos[-1]]
    if probe is None:
        probe = np.linspace(lo - 1.0, hi + 1.0, 1601)
    probe = np.asarray(probe, dtype=float)
    probe = probe[probe != 0]
    if probe.min() > lo or probe.max() < hi:
        raise DomainError("probe grid does not cover the support")
    U = log_potential(d, probe)
    phi = 2 * alpha * U - (0.5 * probe**2 - (1 - alpha) * np.log(probe**2))
    on = _strictly_inside(d, probe)
    off = d(probe) == 0
    off &= ~_near_support(d, probe)
    if not np.any(on):
        raise DomainError("no probe point lies inside the support")
    c = float(phi[on].mean())
    max_dev = float(np.max(np.abs(phi[on] - c)))
    min_slack = float(np.min(c - phi[off])) if np.any(off) else math.inf
    return ELResidual(max_dev, min_slack, c)


def _strictly_inside(d, x):
    # inside a run of positive nodes, at least one cell away from its ends
    idx = (x - d.x0) / d.dx
    i = np.floor(idx).astype(int)
    ok = (i >= 1) & (i + 2 < d.count)
    out = np.zeros(x.size, dtype=bool)
    j = i[ok]
    v = d.values
    out[ok] = (v[j - 1] > 0) & (v[j] > 0) & (v[j + 1] > 0) & (v[j + 2] > 0)
    return out


def _near_support(d, x):
    # within one cell of a positive node: neither clearly on nor off
    idx = np.rint((x - d.x0) / d.dx).astype(int)
    out = np.zeros(x.size, dtype=bool)
    for k in (-1, 0, 1):
        j = idx + k
        ok = (j >= 0) & (j < d.count)
        out[ok] |= d.values[j[ok]] > 0
    return out
