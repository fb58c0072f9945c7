"""Probability measures on the real line.

Three concrete representations share one small interface:

* :class:`Atomic` -- finitely many weighted point masses,
* :class:`GridDensity` -- a density sampled on a uniform grid,
* :class:`Empirical` -- an unweighted sample (each point carries ``1/n``).

Every measure can be viewed as a list of weighted nodes through
:meth:`Measure.atoms`; for grid densities the node weights are the trapezoid
weights, which is what the moment and metric routines consume.
"""

from __future__ import annotations

import json

import numpy as np
from scipy import optimize, sparse

from .errors import DomainError, InvalidMeasureError

MERGE_TOL = 1e-12
MAX_BL_NODES = 10_000


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class Measure:
    """Common interface.  Subclasses are immutable after construction."""

    kind = "abstract"

    def atoms(self):
        """Return ``(x, w)``: sorted node locations and their weights."""
        raise NotImplementedError

    @property
    def mass(self):
        return float(np.sum(self.atoms()[1]))

    def expect(self, fn):
        x, w = self.atoms()
        return float(np.dot(w, fn(x)))

    def moment(self, k):
        return moment(self, k)

    def support_hull(self):
        x, w = self.atoms()
        nz = x[w > 0]
        return float(nz[0]), float(nz[-1])

    def to_dict(self):
        raise NotImplementedError

    def __repr__(self):
        lo, hi = self.support_hull()
        return f"{type(self).__name__}(n={len(self.atoms()[0])}, hull=[{lo:.4g}, {hi:.4g}])"


class Atomic(Measure):
    """Finitely supported probability measure.

    Atoms closer than ``1e-12`` are merged and zero-weight atoms dropped, so
    two atomic measures are equal iff their canonical arrays are equal.
    """

    kind = "atomic"

    def __init__(self, locations, weights, *, normalize=False, meta=None):
        x = np.atleast_1d(np.asarray(locations, dtype=float))
        w = np.atleast_1d(np.asarray(weights, dtype=float))
        if x.shape != w.shape or x.ndim != 1 or x.size == 0:
            raise InvalidMeasureError("locations and weights must be equal-length nonempty 1-d arrays")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise InvalidMeasureError("non-finite atom")
        if np.any(w < 0):
            raise InvalidMeasureError("negative atom weight")
        total = w.sum()
        if normalize:
            if total <= 0:
                raise InvalidMeasureError("zero total mass")
            w = w / total
        elif abs(total - 1.0) > 1e-12:
            raise InvalidMeasureError(f"atom weights sum to {total!r}, not 1")
        self.locations, self.weights = _canonical(x, w)
        self.meta = dict(meta or {})

    @classmethod
    def point(cls, a):
        return cls([a], [1.0])

    def atoms(self):
        return self.locations, self.weights

    @property
    def mass(self):
        return 1.0

    def to_dict(self):
        return {"type": "atomic", "atoms": [[float(a), float(b)] for a, b in zip(self.locations, self.weights)]}

    def __eq__(self, other):
        return (
            isinstance(other, Atomic)
            and np.array_equal(self.locations, other.locations)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None


def _canonical(x, w):
    order = np.argsort(x, kind="stable")
    x, w = x[order], w[order]
    keep = w > 0
    x, w = x[keep], w[keep]
    if x.size == 0:
        raise InvalidMeasureError("all weights are zero")
    # group runs of atoms whose consecutive gaps are below the merge tolerance
    starts = np.concatenate([[True], np.diff(x) > MERGE_TOL])
    group = np.cumsum(starts) - 1
    wm = np.bincount(group, weights=w)
    xm = np.bincount(group, weights=w * x) / wm
    return _frozen(xm), _frozen(wm)


class GridDensity(Measure):
    """Density sampled at ``x0 + i*dx``, ``i = 0..count-1``.

    The values are rescaled at construction so the trapezoid mass is exactly
    one; the mass before rescaling is kept in :attr:`raw_mass`.  Between
    nodes the density is understood as the linear interpolant, and it is
    zero outside the grid.
    """

    kind = "grid"

    def __init__(self, x0, dx, values, *, meta=None):
        v = np.asarray(values, dtype=float)
        if not dx > 0 or not np.isfinite(dx):
            raise InvalidMeasureError(f"grid step must be positive, got {dx!r}")
        if v.ndim != 1 or v.size < 2:
            raise InvalidMeasureError("a grid density needs at least two nodes")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidMeasureError("density values must be finite and nonnegative")
        raw = float(dx * (v.sum() - 0.5 * (v[0] + v[-1])))
        if raw <= 0:
            raise InvalidMeasureError("density has zero mass")
        self.x0 = float(x0)
        self.dx = float(dx)
        self.raw_mass = raw
        self.values = _frozen(v / raw)
        self.meta = dict(meta or {})

    @property
    def count(self):
        return self.values.size

    @property
    def x(self):
        return self.x0 + self.dx * np.arange(self.count)

    @property
    def x_end(self):
        return self.x0 + self.dx * (self.count - 1)

    def trapezoid_weights(self):
        w = np.full(self.count, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w

    def atoms(self):
        return self.x, self.values * self.trapezoid_weights()

    @property
    def mass(self):
        return 1.0

    def __call__(self, x):
        """Linear-interpolant density, zero outside the grid."""
        return np.interp(x, self.x, self.values, left=0.0, right=0.0)

    def to_dict(self):
        return {"type": "grid", "x0": self.x0, "dx": self.dx, "values": [float(v) for v in self.values]}


class Empirical(Measure):
    """Uniform measure on a finite sample; duplicates are kept."""

    kind = "empirical"

    def __init__(self, points, *, meta=None):
        p = np.atleast_1d(np.asarray(points, dtype=float))
        if p.ndim != 1 or p.size == 0:
            raise InvalidMeasureError("empirical measure needs at least one point")
        if not np.all(np.isfinite(p)):
            raise InvalidMeasureError("non-finite sample point")
        self.points = _frozen(np.sort(p))
        self.meta = dict(meta or {})

    @property
    def count(self):
        return self.points.size

    def atoms(self):
        return self.points, np.full(self.count, 1.0 / self.count)

    @property
    def mass(self):
        return 1.0

    def to_atomic(self):
        return Atomic(self.points, np.full(self.count, 1.0 / self.count), normalize=True)

    def to_dict(self):
        return {"type": "empirical", "points": [float(p) for p in self.points]}


class SubMeasure:
    """A probability measure scaled to total mass in ``[0, 1]``.

    ``SubMeasure(None, 0.0)`` is the zero measure.
    """

    def __init__(self, shape, mass):
        mass = float(mass)
        if not -1e-12 <= mass <= 1 + 1e-12:
            raise InvalidMeasureError(f"sub-measure mass {mass!r} outside [0, 1]")
        if shape is None and mass > 1e-12:
            raise InvalidMeasureError("a positive-mass sub-measure needs a shape")
        self.shape = shape if mass > 1e-12 else None
        self.mass = min(max(mass, 0.0), 1.0)

    @classmethod
    def from_points(cls, points, total):
        """``(1/total) * sum of deltas at points``, the scaled-pair convention."""
        points = np.asarray(points, dtype=float)
        if points.size == 0:
            return cls(None, 0.0)
        return cls(Empirical(points), points.size / total)

    def atoms(self):
        if self.shape is None:
            return np.empty(0), np.empty(0)
        x, w = self.shape.atoms()
        return x, w * self.mass

    def moment(self, k):
        return 0.0 if self.shape is None else self.mass * moment(self.shape, k)

    def __repr__(self):
        return f"SubMeasure(mass={self.mass:.6g}, shape={self.shape!r})"


# ----------------------------------------------------------------------
# operations
# ----------------------------------------------------------------------


def moment(m, k):
    """``k``-th raw moment: exact for atoms, trapezoid for grids, mean for samples."""
    k = int(k)
    if k < 0 or k > 64:
        raise DomainError(f"moment order must be in [0, 64], got {k}")
    x, w = m.atoms()
    # sum the two half-lines in mirrored order so symmetric inputs give
    # exactly zero odd moments
    neg = x < 0
    pos = float(np.dot(w[~neg], x[~neg] ** k))
    xn, wn = -x[neg][::-1], w[neg][::-1]
    other = float(np.dot(wn, xn**k))
    return pos - other if k % 2 else pos + other


def d_bl(a, b):
    """Bounded-Lipschitz distance between two (sub-)measures.

    Solves ``max sum_i c_i f_i`` over ``|f_i| <= 1`` and
    ``|f_{i+1} - f_i| <= x_{i+1} - x_i`` on the sorted union of the nodes,
    with ``c`` the signed node weights of ``a - b``.  On the real line the
    adjacent-node constraints imply all pairwise Lipschitz constraints.
    """
    xa, wa = a.atoms()
    xb, wb = b.atoms()
    x = np.concatenate([xa, xb])
    c = np.concatenate([wa, -wb])
    if x.size == 0:
        raise InvalidMeasureError("empty node set")
    order = np.argsort(x, kind="stable")
    x, c = x[order], c[order]
    starts = np.concatenate([[True], np.diff(x) > MERGE_TOL])
    group = np.cumsum(starts) - 1
    c = np.bincount(group, weights=c)
    x = x[starts]
    # zero-weight nodes are redundant: the chained constraints telescope
    keep = c != 0
    x, c = x[keep], c[keep]
    if x.size == 0:
        return 0.0
    if x.size > MAX_BL_NODES:
        raise DomainError(f"d_bl supports at most {MAX_BL_NODES} nodes, got {x.size}")
    if x.size == 1:
        return float(min(abs(c[0]), 2.0 * abs(c[0])))
    return _bl_lp(x, c)


def _bl_lp(x, c):
    n = x.size
    gaps = np.diff(x)
    rows = np.repeat(np.arange(n - 1), 2)
    cols = np.stack([np.arange(n - 1), np.arange(1, n)], axis=1).ravel()
    vals = np.tile([-1.0, 1.0], n - 1)
    D = sparse.csr_matrix((vals, (rows, cols)), shape=(n - 1, n))
    A = sparse.vstack([D, -D]).tocsr()
    ub = np.concatenate([gaps, gaps])
    res = optimize.linprog(-c, A_ub=A, b_ub=ub, bounds=(-1.0, 1.0), method="highs-ds")
    if res.status != 0:
        raise InvalidMeasureError(f"bounded-Lipschitz LP failed: {res.message}")
    return float(min(max(-res.fun, 0.0), 2.0))


def d_bl_pair(a, b):
    """Distance on pairs of sub-measures: sum of the component distances."""
    return d_bl(_AsMeasure(a[0]), _AsMeasure(b[0])) + d_bl(_AsMeasure(a[1]), _AsMeasure(b[1]))


class _AsMeasure:
    # lets d_bl consume SubMeasures, including the zero measure
    def __init__(self, sub):
        self.sub = sub

    def atoms(self):
        return self.sub.atoms()


def symmetrize(m):
    """``(m + reflection of m) / 2`` for a measure carried by ``[0, inf)``."""
    x, w = m.atoms()
    if np.any(x[w > 0] < 0):
        raise DomainError("symmetrize expects a measure supported on [0, inf)")
    if isinstance(m, Empirical):
        return Empirical(np.concatenate([-m.points, m.points]))
    if isinstance(m, Atomic):
        return Atomic(np.concatenate([-x, x]), np.concatenate([w, w]) / 2)
    if isinstance(m, GridDensity):
        half = int(np.ceil(m.x_end / m.dx - 1e-9))
        nodes = m.dx * np.arange(-half, half + 1)
        vals = 0.5 * m(np.abs(nodes))
        return GridDensity(nodes[0], m.dx, vals)
    raise TypeError(f"unsupported measure type {type(m).__name__}")


def dilate(m, lam):
    """Push-forward under ``x -> lam * x``."""
    lam = float(lam)
    if lam == 0 or not np.isfinite(lam):
        raise DomainError("dilation factor must be finite and nonzero")
    if isinstance(m, Empirical):
        return Empirical(lam * m.points)
    if isinstance(m, Atomic):
        return Atomic(lam * m.locations, m.weights)
    if isinstance(m, GridDensity):
        if lam > 0:
            return GridDensity(lam * m.x0, lam * m.dx, m.values / lam)
        return GridDensity(lam * m.x_end, -lam * m.dx, m.values[::-1] / -lam)
    raise TypeError(f"unsupported measure type {type(m).__name__}")


def rademacher():
    return Atomic([-1.0, 1.0], [0.5, 0.5])


# ----------------------------------------------------------------------
# JSON
# ----------------------------------------------------------------------


def from_dict(d):
    kind = d.get("type")
    if kind == "atomic":
        atoms = np.asarray(d["atoms"], dtype=float).reshape(-1, 2)
        return Atomic(atoms[:, 0], atoms[:, 1], normalize=abs(atoms[:, 1].sum() - 1) < 1e-9)
    if kind == "grid":
        return GridDensity(d["x0"], d["dx"], d["values"])
    if kind == "empirical":
        return Empirical(d["points"])
    raise InvalidMeasureError(f"unknown measure type {kind!r}")


def loads(text):
    return from_dict(json.loads(text))


def dumps(m, **extra):
    d = m.to_dict()
    d.update(extra)
    return json.dumps(d)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
