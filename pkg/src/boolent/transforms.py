"""Cauchy and K transforms, Boolean convolution, Stieltjes inversion.

Complex evaluation points are plain Python/NumPy complex numbers; array
arguments are evaluated elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _quad
from .errors import DomainError, InversionError, SingularTransformError
from .measures import Atomic, Empirical, GridDensity, moment

DEFAULT_ORDER = 16
DEFAULT_EPS = (0.1, 0.05, 0.025)
POLE_IMAG_TOL = 1e-8
RESIDUE_NEG_TOL = -1e-10


def _check_upper(z):
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite evaluation point")
    if np.any(z.imag <= 0):
        raise DomainError("transforms are evaluated in the open upper half-plane (Im z > 0)")
    return z


def _out(z, val):
    return complex(val) if np.ndim(z) == 0 else val


def cauchy_transform(m, z):
    """``G(z) = int dm(x) / (z - x)`` for ``Im z > 0``.

    Exact for atomic and empirical measures.  For grid densities the
    integral of the piecewise-linear interpolant is taken in closed form,
    which stays accurate as ``Im z`` shrinks toward the grid spacing.
    """
    zz = _check_upper(z)
    if isinstance(m, GridDensity):
        val = _quad.cauchy(m.x0, m.dx, m.values, zz)
    else:
        x, w = m.atoms()
        flat = zz.ravel()
        val = np.empty(flat.size, dtype=complex)
        step = max(1, 2_000_000 // x.size)
        for lo in range(0, flat.size, step):
            val[lo : lo + step] = (w[None, :] / (flat[lo : lo + step, None] - x[None, :])).sum(axis=1)
        val = val.reshape(zz.shape)
    return _out(z, val)


def k_transform(m, z):
    """``K(z) = z - 1/G(z)``; additive under Boolean convolution."""
    zz = _check_upper(z)
    g = np.asarray(cauchy_transform(m, zz))
    if np.any(np.abs(g) <= 1e-300):
        raise SingularTransformError("Cauchy transform vanishes; K is undefined")
    return _out(z, zz - 1.0 / g)


@dataclass(frozen=True)
class CumulantSeries:
    """Boolean cumulants ``b[0] = b_1, b[1] = b_2, ...``."""

    b: np.ndarray

    @property
    def order(self):
        return len(self.b)

    def __add__(self, other):
        n = min(self.order, other.order)
        return CumulantSeries(self.b[:n] + other.b[:n])

    def moments(self):
        return moments_from_cumulants(self.b)


def cumulants_from_moments(m):
    """Invert ``m_n = sum_{k=1}^n b_k m_{n-k}`` given ``m = (m_1, ..., m_N)``."""
    m = np.concatenate([[1.0], np.asarray(m, dtype=float)])
    n = m.size - 1
    b = np.zeros(n + 1)
    for j in range(1, n + 1):
        b[j] = m[j] - np.dot(b[1:j], m[j - 1 : 0 : -1])
    return b[1:]


def moments_from_cumulants(b):
    """Moments ``(m_1, ..., m_N)`` from Boolean cumulants ``(b_1, ..., b_N)``."""
    b = np.concatenate([[0.0], np.asarray(b, dtype=float)])
    n = b.size - 1
    m = np.zeros(n + 1)
    m[0] = 1.0
    for j in range(1, n + 1):
        m[j] = np.dot(b[1 : j + 1], m[j - 1 :: -1][:j])
    return m[1:]


def boolean_cumulants(m, order=DEFAULT_ORDER):
    order = int(order)
    if not 1 <= order <= 32:
        raise DomainError(f"cumulant order must be in [1, 32], got {order}")
    mom = [moment(m, k) for k in range(1, order + 1)]
    return CumulantSeries(cumulants_from_moments(mom))


# ----------------------------------------------------------------------
# Boolean convolution
# ----------------------------------------------------------------------


def _as_atomic(m):
    if isinstance(m, Empirical):
        return m.to_atomic()
    return m


def cauchy_rational(m):
    """``(num, den)`` coefficient arrays with ``G = num/den`` for an atomic measure."""
    x, w = m.atoms()
    den = np.poly(x)
    num = np.zeros(x.size)
    for i in range(x.size):
        num = num + w[i] * np.poly(np.delete(x, i))
    return num, den


def atoms_from_rational(num, den, *, polish=True):
    """Atomic measure whose Cauchy transform is ``num/den``.

    Poles are the roots of ``den`` (companion matrix eigenvalues), residues
    ``num(r)/den'(r)``.  Poles with a vanishing residue come from common
    factors of numerator and denominator and are dropped.
    """
    den = np.trim_zeros(np.asarray(den, dtype=float), "f")
    num = np.asarray(num, dtype=float)
    roots = np.roots(den)
    dden = np.polyder(den)
    if polish:
        for _ in range(3):
            step = np.polyval(den, roots) / np.polyval(dden, roots)
            ok = np.isfinite(step)
            roots = np.where(ok, roots - np.where(ok, step, 0), roots)
    res = np.polyval(num, roots) / np.polyval(dden, roots)
    significant = np.abs(res) > 1e-10
    bad = significant & (np.abs(roots.imag) > POLE_IMAG_TOL * np.maximum(1.0, np.abs(roots)))
    if np.any(bad):
        raise InversionError(f"non-real pole {roots[bad][0]!r}: numerical breakdown")
    res = res.real
    if np.any(res < RESIDUE_NEG_TOL):
        raise InversionError(f"negative residue {res.min()!r}")
    res = np.clip(res, 0.0, None)
    total = res.sum()
    if abs(total - 1.0) > 1e-10:
        raise InversionError(f"residues sum to {total!r}, not 1")
    return Atomic(roots.real[significant], res[significant], normalize=True)


def boolean_convolve(a, b, order=DEFAULT_ORDER, *, grid=None, eps_schedule=DEFAULT_EPS):
    """Boolean convolution ``a ⊎ b``.

    Atomic (and empirical) inputs are convolved exactly through rational
    arithmetic on ``G = 1/(z - K_a - K_b)``.  Otherwise the same Cauchy
    transform is inverted onto ``grid = (x0, dx, count)``; by default a grid
    of step 0.01 covering both supports' sum.  ``order`` sets the depth of the
    cumulant consistency check recorded in ``meta``.
    """
    a, b = _as_atomic(a), _as_atomic(b)
    if isinstance(a, Atomic) and isinstance(b, Atomic):
        na, da = cauchy_rational(a)
        nb, db = cauchy_rational(b)
        num = np.polymul(na, nb)
        den = np.polysub(
            np.polyadd(np.polymul(da, nb), np.polymul(db, na)),
            np.polymul([1.0, 0.0], num),
        )
        return atoms_from_rational(num, den)

    def g(z):
        return 1.0 / (z - k_transform(a, z) - k_transform(b, z))

    if grid is None:
        ra = max(abs(v) for v in a.support_hull())
        rb = max(abs(v) for v in b.support_hull())
        r = ra + rb + 1.0
        grid = (-r, 0.01, int(round(2 * r / 0.01)) + 1)
    out = stieltjes_invert(g, *grid, eps_schedule=eps_schedule)
    out.meta["order"] = int(order)
    return out


# ----------------------------------------------------------------------
# inversion and Hilbert transform
# ----------------------------------------------------------------------


def richardson_weights(eps):
    """Lagrange weights extrapolating values at ``eps`` to ``eps = 0``.

    For two points ``(e, e/2)`` this is the familiar ``2 f(e/2) - f(e)``.
    """
    eps = np.asarray(eps, dtype=float)
    w = np.ones(eps.size)
    for j in range(eps.size):
        for k in range(eps.size):
            if k != j:
                w[j] *= eps[k] / (eps[k] - eps[j])
    return w


def stieltjes_invert(g, x0, dx, count, eps_schedule=DEFAULT_EPS, *, mass_tol=0.2):
    """Recover a density from a Cauchy-transform evaluator ``g``.

    ``-(1/pi) Im g(x + i eps)`` is computed for every ``eps`` in the
    schedule and extrapolated to ``eps = 0``, clipped at zero and returned as
    a renormalized :class:`GridDensity`.  ``meta["raw_mass"]`` holds the
    extrapolated mass before renormalization.
    """
    eps = np.asarray(eps_schedule, dtype=float)
    if eps.size < 2 or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise DomainError("eps_schedule must be positive, strictly decreasing, length >= 2")
    count = int(count)
    if count < 2 or not dx > 0:
        raise DomainError("grid needs dx > 0 and at least two nodes")
    x = x0 + dx * np.arange(count)
    vals = np.zeros(count)
    for wj, e in zip(richardson_weights(eps), eps):
        gz = np.asarray(g(x + 1j * e), dtype=complex)
        vals += wj * (-gz.imag / np.pi)
    if not np.all(np.isfinite(vals)):
        raise InversionError("non-finite values during inversion")
    vals = np.clip(vals, 0.0, None)
    mass = float(np.dot(_quad.trapezoid_weights(count, dx), vals))
    if not abs(mass - 1.0) <= mass_tol:
        raise InversionError(f"inverted mass {mass:.4g} deviates from 1 by more than {mass_tol}")
    out = GridDensity(x0, dx, vals)
    out.meta.update(raw_mass=mass, eps_schedule=[float(e) for e in eps])
    return out


def hilbert_transform(d, x):
    """Principal value ``(1/pi) PV int d(y) / (x - y) dy``.

    ``x`` must lie strictly inside the grid.  The density is read as its
    linear interpolant and the principal value is taken in closed form.
    """
    if not isinstance(d, GridDensity):
        raise DomainError("hilbert_transform needs a grid density")
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= d.x0) or np.any(xs >= d.x_end):
        raise DomainError("Hilbert transform evaluated outside the open grid interval")
    val = _quad.hilbert(d.x0, d.dx, d.values, xs)
    return float(val) if np.ndim(x) == 0 else val
