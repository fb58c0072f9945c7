"""Boolean central limit semigroup and the Boolean entropy curve.

For a centered measure ``mu`` of unit variance, ``mu_t`` is the law whose
Cauchy transform is

    G_t(z) = 1 / (z - sqrt(t) K_mu(sqrt(t) z)),    t >= 1,

i.e. the ``t``-fold Boolean convolution power of ``mu`` rescaled by
``1/sqrt(t)``.  The curve ``t -> Gamma(mu_t)`` increases to
``Gamma(Rademacher) = 0``, and its slope at ``t = 1`` equals
``E[ell(X/Y)]/2 - 1`` for independent ``X, Y ~ mu``.
"""

from __future__ import annotations

import math

import numpy as np

from . import _quad
from .entropy import gamma_entropy
from .errors import DomainError, InversionError
from .measures import Atomic, Empirical, GridDensity, moment
from .transforms import (
    DEFAULT_EPS,
    atoms_from_rational,
    cauchy_rational,
    k_transform,
    stieltjes_invert,
)


def standardize(m):
    """Affine image of ``m`` with mean 0 and variance 1."""
    m1 = moment(m, 1)
    var = moment(m, 2) - m1 * m1
    if not var > 0:
        raise DomainError("cannot standardize a point mass")
    s = 1.0 / math.sqrt(var)
    if isinstance(m, Atomic):
        return Atomic((m.locations - m1) * s, m.weights)
    if isinstance(m, Empirical):
        return Empirical((m.points - m1) * s)
    if isinstance(m, GridDensity):
        return GridDensity((m.x0 - m1) * s, m.dx * s, m.values / s)
    raise TypeError(f"unsupported measure type {type(m).__name__}")


class SemigroupEvaluator:
    """``mu_t`` for a base measure in the centered, unit-variance class.

    ``tol`` bounds ``|mean|`` and ``|variance - 1|`` of the base; inverted
    densities only meet these to a few digits, so callers feeding them back
    in raise it explicitly.
    """

    def __init__(self, base, t=1.0, tol=1e-8):
        t = float(t)
        if not t >= 1:
            raise DomainError(f"the semigroup is defined for t >= 1, got {t}")
        m1, m2 = moment(base, 1), moment(base, 2)
        if abs(m1) > tol or abs(m2 - 1) > tol:
            raise DomainError(f"base must have mean 0 and variance 1 (got {m1:.3g}, {m2:.3g})")
        if isinstance(base, Empirical):
            base = base.to_atomic()
        self.base = base
        self.t = t
        self._k_rational = None
        if isinstance(base, Atomic):
            # K = w - P/Q = (w Q - P)/Q; the leading terms cancel exactly
            # (unit mass), which keeps large t free of cancellation
            num, den = cauchy_rational(base)
            R = np.polysub(np.polymul([1.0, 0.0], num), den)[1:]
            self._k_rational = (R, num)

    def _k(self, w):
        if self._k_rational is None:
            return np.asarray(k_transform(self.base, w))
        R, Q = self._k_rational
        return np.polyval(R, w) / np.polyval(Q, w)

    def cauchy(self, z):
        """``G_t(z)``."""
        rt = math.sqrt(self.t)
        z = np.asarray(z, dtype=complex)
        val = 1.0 / (z - rt * self._k(rt * z))
        return complex(val) if val.ndim == 0 else val

    def default_grid(self, dx=0.002):
        lo, hi = self.base.support_hull()
        R = max(abs(lo), abs(hi), 1.5) + 1.0
        count = int(round(2 * R / dx)) + 1
        return -R, dx, count

    def measure(self, grid=None, eps_schedule=DEFAULT_EPS):
        """``mu_t``: exact atoms for an atomic base, else an inverted grid density."""
        if isinstance(self.base, Atomic):
            if self.t == 1:
                return self.base
            return _atomic_mu_t(self.base, self.t)
        if grid is None:
            grid = self.default_grid()
        out = stieltjes_invert(self.cauchy, *grid, eps_schedule=eps_schedule)
        out.meta["t"] = self.t
        return out


def _atomic_mu_t(base, t):
    # G_t = Q(w) / (sqrt(t) P(w) - (t - 1) z Q(w)) with w = sqrt(t) z, where
    # G_base = Q/P; rescale the polynomial coefficients to the variable z
    num, den = cauchy_rational(base)
    rt = math.sqrt(t)

    def rescale(c):
        deg = len(c) - 1
        return np.asarray(c) * rt ** np.arange(deg, -1, -1)

    Qz, Pz = rescale(num), rescale(den)
    D = np.polysub(rt * Pz, (t - 1) * np.polymul([1.0, 0.0], Qz))
    lead = D[np.flatnonzero(np.abs(D) > 0)[0]]
    out = atoms_from_rational(Qz / lead, D / lead)
    out.meta["t"] = t
    return out


def mu_t_cauchy(s, z):
    return s.cauchy(z)


def mu_t_measure(s, grid=None, eps_schedule=DEFAULT_EPS):
    return s.measure(grid, eps_schedule)


def gamma_curve(base, ts, grid=None, eps_schedule=DEFAULT_EPS, tol=1e-8):
    """``[(t, Gamma(mu_t)) for t in ts]``.

    On an inversion failure an :class:`InversionError` is raised whose
    ``partial`` attribute carries the values computed so far.
    """
    if isinstance(base, SemigroupEvaluator):
        base = base.base
    ts = [float(t) for t in ts]
    if any(t < 1 for t in ts) or ts != sorted(ts):
        raise DomainError("ts must be sorted ascending and >= 1")
    out = []
    for t in ts:
        s = SemigroupEvaluator(base, t, tol=tol)
        try:
            mt = s.measure(grid, eps_schedule)
        except InversionError as exc:
            err = InversionError(f"inversion failed at t={t}: {exc}")
            err.partial = out
            raise err from exc
        out.append((t, gamma_entropy(mt)))
    return out


def gamma_prime_fd(base, h=1e-2, **kw):
    """Forward difference ``(gamma(1 + h) - gamma(1)) / h`` of the entropy curve."""
    (_, g0), (_, g1) = gamma_curve(base, [1.0, 1.0 + h], **kw)
    return (g1 - g0) / h


# ----------------------------------------------------------------------
# ell and the derivative identity
# ----------------------------------------------------------------------


def ell(x):
    """``ell(x) = (x + 1)/(x - 1) * log x**2``, extended by ``ell(1) = 4``.

    ``ell(0) = +inf``; ``ell >= 0`` everywhere, with local minima
    ``ell(-1) = 0`` and ``ell(1) = 4``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    u = x - 1.0
    near = np.abs(u) < 1e-5
    zero = x == 0
    reg = ~near & ~zero
    xr = x[reg]
    out[reg] = (xr + 1.0) / (xr - 1.0) * np.log(xr * xr)
    out[near] = 4.0 + u[near] ** 2 / 3.0
    out[zero] = np.inf
    return float(out) if out.ndim == 0 else out


def gamma_prime_1(m, zero_mass_tol=1e-6):
    """``E[ell(X/Y)]/2 - 1`` for independent ``X, Y ~ m``.

    Atomic and empirical measures: exact double sum (atoms at 0 carrying
    at most ``zero_mass_tol`` are discarded, more is a domain error).
    Grid densities: the principal-value form
    ``2 pi int x log(x**2) H(x) f(x) dx - Gamma(m) - 1`` with ``H`` the
    Hilbert transform, which has no singular integrand.
    """
    if isinstance(m, GridDensity):
        H = _quad.hilbert_nodes(m.x0, m.dx, m.values)
        x = m.x
        with np.errstate(divide="ignore", invalid="ignore"):
            xl = np.where(x != 0, x * np.log(np.where(x != 0, x * x, 1.0)), 0.0)
        integral = float(np.dot(m.trapezoid_weights(), xl * H * m.values))
        return 2 * np.pi * integral - gamma_entropy(m) - 1.0
    x, w = m.atoms()
    at0 = x == 0
    if w[at0].sum() > zero_mass_tol:
        raise DomainError("X/Y is undefined: the measure charges 0")
    x, w = x[~at0], w[~at0]
    w = w / w.sum()
    total = 0.0
    step = max(1, 4_000_000 // x.size)
    for lo in range(0, x.size, step):
        ratio = x[lo : lo + step, None] / x[None, :]
        total += float(np.sum(w[lo : lo + step, None] * w[None, :] * ell(ratio)))
    return 0.5 * total - 1.0


__all__ = [
    "SemigroupEvaluator",
    "standardize",
    "mu_t_cauchy",
    "mu_t_measure",
    "gamma_curve",
    "gamma_prime_fd",
    "gamma_prime_1",
    "ell",
]
