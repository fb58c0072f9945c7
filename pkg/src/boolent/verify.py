"""Consistency checks between samplers, weights and rate functions."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import ensembles
from .entropy import rate_i, rate_jplus
from .errors import BoolentError, DomainError
from .measures import Atomic, GridDensity, d_bl, moment, rademacher

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class WeightModel:
    """Unnormalized eigenvalue weights: ``kind`` is ``"wishart"`` or ``"gue"``."""

    kind: str
    a: int
    b: int

    @classmethod
    def wishart_singular(cls, p, n):
        if p < 1 or n < p:
            raise DomainError("need 1 <= p <= n")
        return cls("wishart", p, n)

    @classmethod
    def conditioned_gue(cls, M, N):
        if M < 1 or N < M:
            raise DomainError("need 1 <= M <= N")
        return cls("gue", M, N)

    @property
    def speed(self):
        return self.a * self.b

    def rate(self, m):
        """Normalized rate whose difference predicts the log-weight ratio."""
        return (rate_jplus(m) if self.kind == "wishart" else rate_i(m)).normalized


def log_weight(wm, config):
    """Exact log of the unnormalized density; ``-inf`` on collisions or zeros.

    Wishart singular values (``p`` of them, sample size ``n``)::

        2 sum_{i<j} log|s_i^2 - s_j^2| + (2(n-p)+1) sum log s_i - n sum s_i^2

    Conditioned GUE (``M`` eigenvalues, dimension ``N``)::

        2(N-M) sum log|l_i| + 2 sum_{i<j} log|l_i - l_j| - (N/2) sum l_i^2
    """
    x = np.sort(np.asarray(config, dtype=float))
    if wm.kind == "gue":
        if x.size != wm.a:
            raise DomainError(f"expected {wm.a} eigenvalues, got {x.size}")
        return ensembles.gue_log_target(x, wm.b)
    p, n = wm.a, wm.b
    if x.size != p:
        raise DomainError(f"expected {p} singular values, got {x.size}")
    if np.any(x < 0):
        raise DomainError("singular values must be nonnegative")
    if np.any(x == 0):
        return -math.inf
    sq = x * x
    d = np.abs(sq[:, None] - sq[None, :])[np.triu_indices(p, 1)]
    if np.any(d == 0):
        return -math.inf
    return float(2 * np.sum(np.log(d)) + (2 * (n - p) + 1) * np.sum(np.log(x)) - n * np.sum(sq))


def quantile_configuration(m, count):
    """Points ``F^{-1}(i/(count+1))``, ``i = 1..count``, of a grid density.

    ``F`` is the exact CDF of the piecewise-linear interpolant, inverted by
    solving the quadratic on the cell that contains each level.
    """
    if not isinstance(m, GridDensity):
        raise DomainError("quantile configurations need an atomless (grid) measure")
    f, h = m.values, m.dx
    cell = 0.5 * h * (f[:-1] + f[1:])
    F = np.concatenate([[0.0], np.cumsum(cell)])
    F /= F[-1]
    q = np.arange(1, count + 1) / (count + 1)
    k = np.clip(np.searchsorted(F, q, side="right") - 1, 0, f.size - 2)
    # mass from x_k to x_k + u is f_k u + (f_{k+1} - f_k) u^2 / (2h)
    r = (q - F[k]) * np.sum(cell)
    a = (f[k + 1] - f[k]) / (2 * h)
    b = f[k]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(
            np.abs(a) > 1e-14 * np.maximum(b, 1e-300) / h,
            (-b + np.sqrt(np.maximum(b * b + 4 * a * r, 0.0))) / (2 * a),
            r / np.where(b > 0, b, 1.0),
        )
    u = np.clip(u, 0.0, h)
    return m.x[k] + u


def ldp_weight_ratio_check(wm, target_a, target_b, quantile_count=None):
    """Compare a log-weight ratio with the rate difference it should predict.

    Returns ``(measured, predicted)`` where

    * ``measured = (log_weight(x_a) - log_weight(x_b)) / speed`` for the
      quantile configurations ``x_a``, ``x_b`` of the two targets,
    * ``predicted = rate(target_b) - rate(target_a)``.
    """
    count = quantile_count or wm.a
    if count != wm.a:
        raise DomainError("quantile_count must equal the model's particle count")
    xa = quantile_configuration(target_a, count)
    xb = quantile_configuration(target_b, count)
    measured = (log_weight(wm, xa) - log_weight(wm, xb)) / wm.speed
    predicted = wm.rate(target_b) - wm.rate(target_a)
    return float(measured), float(predicted)


# ----------------------------------------------------------------------
# convergence statistics
# ----------------------------------------------------------------------


def two_point(p):
    """``p delta_sqrt2 + (1 - p) delta_-sqrt2``."""
    p = min(max(float(p), 0.0), 1.0)
    return Atomic([-SQRT2, SQRT2], [1.0 - p, p], normalize=True)


def distance_to_m0(m, coarse=21):
    """``min_p d_bl(m, p delta_sqrt2 + (1-p) delta_-sqrt2)`` and the minimizing ``p``.

    The distance is convex in ``p`` (a supremum of affine functions), so a
    coarse scan followed by bounded Brent refinement finds the minimum.
    """
    ps = np.linspace(0.0, 1.0, coarse)
    vals = [d_bl(m, two_point(p)) for p in ps]
    i = int(np.argmin(vals))
    lo, hi = ps[max(i - 1, 0)], ps[min(i + 1, coarse - 1)]
    res = optimize.minimize_scalar(lambda p: d_bl(m, two_point(p)), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-6})
    if res.fun < vals[i]:
        return float(res.fun), float(res.x)
    return float(vals[i]), float(ps[i])


def _replica(cfg):
    rec = {"seed": cfg.seed}
    try:
        if isinstance(cfg.model, ensembles.WishartBlock):
            _, refl = ensembles.sample_wishart_block(cfg)
            m = refl
            rec["d_bl_rademacher"] = d_bl(refl, rademacher())
        else:
            m = ensembles.sample_conditioned_gue(cfg)
            dist, p = distance_to_m0(m)
            rec["d_bl_m0"] = dist
            rec["p_star"] = p
            _, a, _ = ensembles.scaled_pair(m.points, cfg.model.M, cfg.model.N)
            rec["mass_alpha"] = a.mass
            if "warning" in m.meta:
                rec["warning"] = m.meta["warning"]
        rec["m2"] = moment(m, 2)
        rec["m4"] = moment(m, 4)
    except BoolentError as exc:
        rec["error"] = f"{type(exc).__name__}: {exc}"
    return rec


def _threads():
    try:
        return max(1, int(os.environ.get("BEL_THREADS", "1")))
    except ValueError:
        return 1


def convergence_stats(cfg, replicas, base_seed=0):
    """Run ``replicas`` independent samples with seeds ``base_seed, base_seed+1, ...``.

    Returns ``{"replicas": [...], "aggregate": {...}}``.  Aggregates are
    means over the replicas that did not fail.  Replicas run in parallel
    processes when ``BEL_THREADS`` > 1.
    """
    if replicas < 1:
        raise DomainError("replicas must be >= 1")
    cfgs = [cfg.with_seed(base_seed + r) for r in range(replicas)]
    workers = min(_threads(), replicas)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            recs = list(ex.map(_replica, cfgs))
    else:
        recs = [_replica(c) for c in cfgs]
    ok = [r for r in recs if "error" not in r]
    keys = sorted({k for r in ok for k in r if k not in ("seed", "warning")})
    agg = {f"mean_{k}": float(np.mean([r[k] for r in ok])) for k in keys}
    agg["n_ok"] = len(ok)
    agg["n_failed"] = len(recs) - len(ok)
    return {"replicas": recs, "aggregate": agg}
