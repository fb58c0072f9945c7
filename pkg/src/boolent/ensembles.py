"""Samplers for the two random-matrix models and the pair rescaling.

* Wishart block: singular values of ``G / sqrt(2n)`` for a ``p x n`` complex
  Gaussian ``G`` whose real and imaginary parts are standard normal, plus the
  reflected (symmetrized) singular-value measure.
* Conditioned GUE: Metropolis-Hastings on the eigenvalue density
  ``prod |l_i|^{2(N-M)} prod_{i<j} |l_i - l_j|^2 exp(-N/2 sum l_i^2)``.

All randomness flows from ``numpy.random.default_rng(seed)`` (PCG64).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError
from .measures import Empirical, SubMeasure, symmetrize

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class WishartBlock:
    p: int
    n: int

    def __post_init__(self):
        if self.p < 1 or self.n < self.p:
            raise DomainError(f"need 1 <= p <= n, got p={self.p}, n={self.n}")


@dataclass(frozen=True)
class ConditionedGUE:
    M: int
    N: int

    def __post_init__(self):
        if self.M < 1 or self.N < self.M:
            raise DomainError(f"need 1 <= M <= N, got M={self.M}, N={self.N}")


@dataclass(frozen=True)
class MCMCParams:
    burnin: int = 2000
    steps: int = 2000
    proposal_sd: float | None = None
    adapt: bool = True

    def __post_init__(self):
        if self.steps < 1 or self.burnin < 0:
            raise DomainError("MCMC needs steps >= 1 and burnin >= 0")


@dataclass(frozen=True)
class EnsembleConfig:
    model: WishartBlock | ConditionedGUE
    seed: int = 0
    mcmc: MCMCParams = field(default_factory=MCMCParams)

    def with_seed(self, seed):
        return EnsembleConfig(self.model, int(seed), self.mcmc)


# ----------------------------------------------------------------------
# Wishart block
# ----------------------------------------------------------------------


def sample_wishart_block(cfg):
    """Return ``(singular_values, reflected)`` as empirical measures."""
    if not isinstance(cfg.model, WishartBlock):
        raise DomainError("sample_wishart_block needs a WishartBlock config")
    p, n = cfg.model.p, cfg.model.n
    rng = np.random.default_rng(cfg.seed)
    G = rng.standard_normal((p, n)) + 1j * rng.standard_normal((p, n))
    try:
        s = np.linalg.svd(G / math.sqrt(2 * n), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed for p={p}, n={n}, seed={cfg.seed}: {exc}") from exc
    sv = Empirical(s, meta={"model": "wishart-block", "p": p, "n": n, "seed": cfg.seed})
    return sv, symmetrize(sv)


# ----------------------------------------------------------------------
# conditioned GUE
# ----------------------------------------------------------------------


def gue_log_target(lam, N):
    """Unnormalized log-density of the conditioned GUE eigenvalues."""
    lam = np.asarray(lam, dtype=float)
    M = lam.size
    if np.any(lam == 0):
        return -math.inf
    diff = lam[:, None] - lam[None, :]
    iu = np.triu_indices(M, 1)
    d = np.abs(diff[iu])
    if np.any(d == 0):
        return -math.inf
    return float(
        2 * (N - M) * np.sum(np.log(np.abs(lam))) + 2 * np.sum(np.log(d)) - 0.5 * N * np.sum(lam * lam)
    )


def _initial_state(M, N, rng):
    r = math.sqrt(2 * (N - M) / N) if N > M else 1.0
    signs = rng.choice([-1.0, 1.0], size=M)
    jitter = rng.standard_normal(M) / math.sqrt(2 * N)
    return signs * (r + jitter)


def _sweep(lam, M, N, sd, z, u, v):
    """One sweep: M single-site Gaussian moves then M sign flips.

    ``z``, ``u``, ``v`` hold the sweep's pre-drawn normals and uniforms.
    The sign flip ``l_i -> -l_i`` is a symmetric involution; without it the
    chain could not cross the zero of ``|l|^{2(N-M)}``.
    Returns the numbers of accepted moves of each kind.
    """
    c = 2.0 * (N - M)
    h = 0.5 * N
    log = math.log
    acc_move = acc_flip = 0
    for i in range(M):
        old = lam[i]
        new = old + sd * z[i]
        if new == 0.0:
            continue
        delta = c * (log(abs(new)) - log(abs(old))) - h * (new * new - old * old)
        collided = False
        for j in range(M):
            if j != i:
                dn = abs(new - lam[j])
                if dn == 0.0:
                    collided = True
                    break
                delta += 2.0 * (log(dn) - log(abs(old - lam[j])))
        if collided:
            continue
        if delta >= 0 or u[i] < math.exp(delta):
            lam[i] = new
            acc_move += 1
    for i in range(M):
        li = lam[i]
        delta = 0.0
        for j in range(M):
            if j != i:
                delta += 2.0 * (log(abs(li + lam[j])) - log(abs(li - lam[j])))
        if delta >= 0 or v[i] < math.exp(delta):
            lam[i] = -li
            acc_flip += 1
    return acc_move, acc_flip


def _default_sd(N):
    # curvature of the log-target near +-sqrt 2 is about -2N
    return 2.4 / math.sqrt(2.0 * N)


def run_chain(cfg, keep_every=1):
    """Run the conditioned-GUE chain and return ``(states, info)``.

    ``states`` has one row per kept sweep after burn-in (none when
    ``keep_every`` is 0).  ``info`` records the final state, the final
    proposal scale and acceptance rates, plus a ``warning`` entry when
    most post-burn-in sweeps accepted no single-site move.
    """
    if not isinstance(cfg.model, ConditionedGUE):
        raise DomainError("run_chain needs a ConditionedGUE config")
    M, N = cfg.model.M, cfg.model.N
    mc = cfg.mcmc
    rng = np.random.default_rng(cfg.seed)
    lam = [float(v) for v in _initial_state(M, N, rng)]
    sd = mc.proposal_sd or _default_sd(N)
    log_sd = math.log(sd)
    kept = []
    moves = flips = 0
    stalled = 0
    total = mc.burnin + mc.steps
    batch = 256
    for start in range(0, total, batch):
        nb = min(batch, total - start)
        Z = rng.standard_normal((nb, M))
        U = rng.random((nb, M))
        V = rng.random((nb, M))
        for b in range(nb):
            k = start + b
            am, af = _sweep(lam, M, N, sd, Z[b], U[b], V[b])
            if k < mc.burnin:
                if mc.adapt:
                    # Robbins-Monro on log sd toward acceptance 0.3
                    log_sd += (am / M - 0.3) / math.sqrt(k + 1.0)
                    sd = math.exp(log_sd)
                continue
            moves += am
            flips += af
            if am == 0:
                stalled += 1
            if keep_every and (k - mc.burnin) % keep_every == 0:
                kept.append(list(lam))
    info = {
        "final_state": list(lam),
        "proposal_sd": sd,
        "move_acceptance": moves / (mc.steps * M),
        "flip_acceptance": flips / (mc.steps * M),
    }
    # an isolated rejected sweep is routine for small M; flag persistent stalls
    if moves == 0 or stalled > 0.5 * mc.steps:
        info["warning"] = f"mixing failure: {stalled} of {mc.steps} sweeps accepted no move"
    return np.array(kept), info


def sample_conditioned_gue(cfg):
    """Final state of the chain as an empirical measure (diagnostics in ``meta``)."""
    _, info = run_chain(cfg, keep_every=0)
    lam = info.pop("final_state")
    meta = {"model": "cond-gue", "M": cfg.model.M, "N": cfg.model.N, "seed": cfg.seed, **info}
    return Empirical(lam, meta=meta)


# ----------------------------------------------------------------------
# Theta_M and the scaled pair
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaSolution:
    theta: float
    residual: float
    iterations: int


def solve_theta(M, N, *, damping=0.5, max_iter=10_000):
    """Solve ``M**2 log(theta**-2) = N M theta**2`` for ``theta`` in ``(0, 1)``."""
    if not 1 <= M < N:
        raise DomainError(f"need 1 <= M < N, got M={M}, N={N}")
    c = M / N
    u = c
    for it in range(1, max_iter + 1):
        u = (1 - damping) * u + damping * c * math.log(1.0 / u)
        res = abs(M * M * math.log(1.0 / u) - N * M * u)
        if res <= 1e-9 * N * M * u:
            return ThetaSolution(math.sqrt(u), res, it)
    raise NumericalError(f"theta iteration did not converge in {max_iter} steps")


@dataclass(frozen=True)
class ScaledPair:
    alpha_points: np.ndarray
    beta_points: np.ndarray
    m0: int


def scaled_pair(lam, M, N, theta=None):
    """Zoom into the two clusters at ``+-sqrt 2`` by ``1/theta``.

    Returns ``(ScaledPair, a, b)`` with ``a = (1/M) sum delta_{alpha_i}`` and
    ``b = (1/M) sum delta_{beta_i}`` as sub-measures.  ``lam_i = 0`` counts
    toward the alpha side.
    """
    lam = np.asarray(lam, dtype=float)
    if theta is None:
        theta = solve_theta(M, N).theta
    pos = lam >= 0
    alpha = (lam[pos] - SQRT2) / theta
    beta = (lam[~pos] + SQRT2) / theta
    pair = ScaledPair(alpha, beta, int(pos.sum()))
    return pair, SubMeasure.from_points(alpha, M), SubMeasure.from_points(beta, M)
