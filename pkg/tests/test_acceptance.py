"""End-to-end acceptance criteria; each test prints one PASS/FAIL line."""

import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy import optimize

from boolent import booleanclt as clt
from boolent import ensembles as ens
from boolent import entropy, laws, verify
from boolent.measures import Atomic, Empirical, GridDensity, d_bl, moment, symmetrize
from boolent.transforms import boolean_convolve, cauchy_transform, stieltjes_invert

SQ2 = math.sqrt(2.0)


def centered_atomic(rng, kmax=4):
    k = int(rng.integers(2, kmax + 1))
    x = rng.normal(size=k) * 2
    w = rng.dirichlet(np.ones(k))
    x = x - np.dot(w, x)
    return Atomic(x, w, normalize=True)


def unit_atomic(rng, kmax=4):
    m = centered_atomic(rng, kmax)
    return clt.standardize(m)


def moments_via_cumulants(ma, mb, order):
    # independent oracle: Boolean cumulants from m_n = sum_k b_k m_{n-k},
    # added, then mapped back to moments
    def cumulants(m):
        b = np.zeros(order + 1)
        for n in range(1, order + 1):
            b[n] = m[n] - sum(b[k] * m[n - k] for k in range(1, n))
        return b

    b = cumulants(ma) + cumulants(mb)
    m = np.zeros(order + 1)
    m[0] = 1.0
    for n in range(1, order + 1):
        m[n] = sum(b[k] * m[n - k] for k in range(1, n + 1))
    return m


def uniform_on(lo, hi, dx=1e-4):
    x0 = lo - dx
    n = int(round((hi - lo) / dx)) + 3
    x = x0 + dx * np.arange(n)
    return GridDensity(x0, dx, ((x >= lo - 1e-12) & (x <= hi + 1e-12)).astype(float))


def test_01_boolean_convolution(accept):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        a, b = centered_atomic(rng), centered_atomic(rng)
        c = boolean_convolve(a, b)
        ma = [moment(a, k) for k in range(9)]
        mb = [moment(b, k) for k in range(9)]
        oracle = moments_via_cumulants(ma, mb, 8)
        got = np.array([moment(c, k) for k in range(9)])
        worst = max(worst, float(np.max(np.abs(got - oracle) / np.maximum(1.0, np.abs(oracle)))))
    rr = boolean_convolve(laws.rademacher(), laws.rademacher())
    x, w = rr.atoms()
    rad_ok = x.size == 2 and np.allclose(x, [-SQ2, SQ2], atol=1e-10) and np.all(np.abs(w - 0.5) <= 1e-10)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and rad_ok and dt < 10
    accept(1, ok, f"moment error {worst:.2e} (<= 1e-9), Rademacher^2 atoms {x.round(12)}, {dt:.1f}s")


@pytest.mark.slow
def test_02_fixed_point_and_limit(accept):
    t0 = time.perf_counter()
    rad = clt.gamma_curve(laws.rademacher(), range(1, 17))
    rad_max = max(abs(g) for _, g in rad)
    base = clt.standardize(laws.semicircle())
    curve = clt.gamma_curve(base, [1, 2, 4, 8, 16, 1e4])
    g = [v for _, v in curve]
    increasing = all(b > a for a, b in zip(g[:5], g[1:5]))
    dt = time.perf_counter() - t0
    ok = rad_max < 1e-6 and abs(g[0] + 1) <= 2e-2 and increasing and g[-1] > -2e-2 and dt < 120
    accept(2, ok, f"|gamma_rad| max {rad_max:.1e}; semicircle curve {np.round(g, 4).tolist()}, {dt:.0f}s")


@pytest.mark.slow
def test_03_derivative_identity(accept):
    rng = np.random.default_rng(7)
    cases = [("semicircle", clt.standardize(laws.semicircle()))]
    cases += [(f"atomic{i}", unit_atomic(rng)) for i in range(3)]
    diffs = {}
    for name, m in cases:
        diffs[name] = abs(clt.gamma_prime_1(m) - clt.gamma_prime_fd(m, h=1e-2))
    rad = clt.gamma_prime_1(laws.rademacher())
    ok = max(diffs.values()) <= 5e-2 and abs(rad) <= 1e-6
    detail = ", ".join(f"{k} {v:.1e}" for k, v in diffs.items())
    accept(3, ok, f"|identity - FD| {detail} (<= 5e-2); Rademacher {rad:.1e}")


def test_04_maximality(accept):
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    worst, bad_equality = -math.inf, 0
    for i in range(1000):
        k = int(rng.integers(1, 7))
        if i % 10 == 0:
            x = rng.choice([-1.0, 1.0], size=k)
        else:
            x = rng.standard_normal(k) * rng.exponential(1.0, k)
        w = rng.dirichlet(np.ones(k))
        x = x / math.sqrt(float(np.dot(w, x * x)))
        m = Atomic(x, w, normalize=True)
        g = entropy.gamma_entropy(m)
        worst = max(worst, g)
        on_circle = np.allclose(np.abs(m.locations), 1.0, atol=1e-9)
        if (abs(g) <= 1e-12) != on_circle:
            bad_equality += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and bad_equality == 0 and dt < 5
    accept(4, ok, f"max Gamma {worst:.1e} (<= 1e-12), equality mismatches {bad_equality}, {dt:.1f}s")


def exact_rate_i_at(x):
    # u - log(1 + u) for u = x^2/2 - 1 evaluated in exact rationals: the float
    # sqrt(2) is not sqrt(2), so the exact rate there is ~u^2/2, not 0
    u = Fraction(x) ** 2 / 2 - 1
    return float(sum((-1) ** k * u**k / k for k in range(2, 8)))


def test_05_minimizers(accept):
    checks = {"jplus(delta_1)": (entropy.rate_jplus(Atomic([1.0], [1.0])).normalized, 0.0)}
    for p in (0.0, 0.25, 0.5, 1.0):
        got = entropy.rate_i(Atomic([-SQ2, SQ2], [1 - p, p])).normalized
        checks[f"i(p={p})"] = (got, exact_rate_i_at(SQ2))
    exact_ok = all(v == pytest.approx(e, rel=1e-12, abs=0) for v, e in checks.values())
    jg = {g: entropy.rate_jgamma(laws.marchenko_pastur(g), g).normalized for g in (0.25, 0.5, 1.0)}
    ia = {a: entropy.rate_ialpha(laws.p_alpha(a), a).normalized for a in (0.25, 0.5, 1.0)}
    el = {a: entropy.euler_lagrange_residual(laws.p_alpha(a), a) for a in (0.25, 0.5, 1.0)}
    ok = (exact_ok and all(abs(v) <= 1e-2 for v in jg.values()) and all(abs(v) <= 2e-2 for v in ia.values())
          and all(r.max_dev <= 1e-2 and r.min_slack >= -1e-2 for r in el.values()))
    accept(5, ok, f"exact rates {'match exact values' if exact_ok else checks} (i at float sqrt2: {checks['i(p=0.5)'][0]:.2e}); Jgamma max {max(map(abs, jg.values())):.1e}; "
                  f"Ialpha max {max(map(abs, ia.values())):.1e}; EL max_dev {max(r.max_dev for r in el.values()):.1e}, "
                  f"min_slack {min(r.min_slack for r in el.values()):.1e}")


def test_06_p_alpha_structure(accept):
    masses = []
    for alpha in np.round(np.arange(0.1, 1.01, 0.1), 2):
        spec = laws.LawSpec("p-alpha", alpha=float(alpha))
        masses.append(laws.make_law(spec, laws.default_grid(spec)).raw_mass)
    mass_dev = max(abs(m - 1) for m in masses)
    x = np.linspace(-3, 3, 60001)
    sc_dev = float(np.max(np.abs(laws.p_alpha_density(x, 1.0) - laws.semicircle_density(x))))
    small = laws.p_alpha(1e-3)
    m2, m4 = moment(small, 2), moment(small, 4)
    ok = mass_dev <= 1e-3 and sc_dev <= 1e-8 and abs(m2 - 2) <= 1e-2 and abs(m4 - 4) <= 1e-2
    accept(6, ok, f"mass deviation {mass_dev:.1e}, |p_1 - semicircle| {sc_dev:.1e}, "
                  f"alpha=1e-3 moments ({m2:.4f}, {m4:.4f})")


@pytest.mark.slow
def test_07_sampler_concentration(accept):
    t0 = time.perf_counter()
    w = verify.convergence_stats(ens.EnsembleConfig(ens.WishartBlock(30, 3000)), 20)["aggregate"]
    g = verify.convergence_stats(ens.EnsembleConfig(ens.ConditionedGUE(20, 1000)), 20)["aggregate"]
    dt = time.perf_counter() - t0
    ok = (w["n_ok"] == 20 and g["n_ok"] == 20 and w["mean_d_bl_rademacher"] < 0.1 and g["mean_d_bl_m0"] < 0.1
          and abs(g["mean_m2"] - 2) <= 0.1 and abs(g["mean_m4"] - 4) <= 0.3 and dt < 600)
    accept(7, ok, f"Wishart d_bl {w['mean_d_bl_rademacher']:.3f}; GUE d_bl {g['mean_d_bl_m0']:.3f}, "
                  f"m2 {g['mean_m2']:.3f}, m4 {g['mean_m4']:.3f}; {dt:.0f}s")


def rejection_sample(rng, n):
    # proposal |l|^12 exp(-3 l^2) per coordinate (l^2 ~ Gamma(6.5, 1/3), random sign);
    # the target ratio (l1 - l2)^2 exp(-(l1^2 + l2^2)) is bounded by 2/e
    out = []
    have = 0
    while have < n:
        lam = np.sqrt(rng.gamma(6.5, 1 / 3, size=(n, 2))) * rng.choice([-1.0, 1.0], size=(n, 2))
        s = np.sum(lam * lam, axis=1)
        acc = (lam[:, 0] - lam[:, 1]) ** 2 * np.exp(-s) * math.e / 2
        keep = lam[rng.random(n) < acc]
        out.append(keep)
        have += keep.shape[0]
    return np.concatenate(out)[:n].ravel()


def binned(points, edges):
    counts, _ = np.histogram(points, bins=edges)
    centers = 0.5 * (edges[1:] + edges[:-1])
    nz = counts > 0
    return Atomic(centers[nz], counts[nz] / counts.sum())


@pytest.mark.slow
def test_08_small_mcmc_oracle(accept):
    t0 = time.perf_counter()
    cfg = ens.EnsembleConfig(ens.ConditionedGUE(2, 8), 1, ens.MCMCParams(burnin=10_000, steps=1_000_000))
    states, info = ens.run_chain(cfg)
    chain = states.ravel()
    exact = rejection_sample(np.random.default_rng(5), 1_000_000)
    edges = np.linspace(-4, 4, 8001)
    for pts in (chain, exact):
        assert np.all(np.abs(pts) < 4)
    dist = d_bl(binned(chain, edges), binned(exact, edges))
    dt = time.perf_counter() - t0
    ok = dist <= 0.05 and dt < 300
    accept(8, ok, f"d_bl(chain, rejection) {dist:.4f} (<= 0.05) over 1e6 sweeps, "
                  f"acceptance {info['move_acceptance']:.2f}/{info['flip_acceptance']:.2f}, {dt:.0f}s")


def test_09_weight_ratio(accept):
    t0 = time.perf_counter()
    wm = verify.WeightModel.wishart_singular(40, 4000)
    mw, pw = verify.ldp_weight_ratio_check(wm, uniform_on(0.9, 1.1), uniform_on(1.9, 2.1))
    gm = verify.WeightModel.conditioned_gue(40, 4000)
    mg, pg = verify.ldp_weight_ratio_check(gm, symmetrize(uniform_on(1.3, 1.5)), symmetrize(uniform_on(2.3, 2.5)))
    rw, rg = abs(mw - pw) / abs(pw), abs(mg - pg) / abs(pg)
    dt = time.perf_counter() - t0
    ok = rw < 0.15 and rg < 0.15 and dt < 60
    accept(9, ok, f"Wishart {mw:.4f} vs {pw:.4f} (rel {rw:.3f}); GUE {mg:.4f} vs {pg:.4f} (rel {rg:.3f})")


@pytest.mark.slow
def test_10_scaled_pair_mass(accept):
    t0 = time.perf_counter()
    agg = verify.convergence_stats(ens.EnsembleConfig(ens.ConditionedGUE(20, 2000)), 50)["aggregate"]
    oracle = optimize.brentq(lambda u: u - 0.01 * math.log(1 / u), 1e-12, 1.0, xtol=1e-15)
    th2 = ens.solve_theta(10, 1000).theta ** 2
    dt = time.perf_counter() - t0
    ok = agg["n_ok"] == 50 and abs(agg["mean_mass_alpha"] - 0.5) < 0.03 and abs(th2 - oracle) <= 1e-3 \
        and abs(th2 - 0.0336) <= 1e-3
    accept(10, ok, f"mean mass(mu_alpha) {agg['mean_mass_alpha']:.4f}; theta^2 {th2:.5f} "
                   f"(oracle {oracle:.5f}); {dt:.0f}s")


def test_11_transform_round_trip(accept):
    sc = laws.semicircle()
    inv = stieltjes_invert(lambda z: cauchy_transform(sc, z), -3.0, 0.01, 601)
    sup_err = float(np.max(np.abs(inv.values - laws.semicircle_density(inv.x))))
    rng = np.random.default_rng(99)
    pool = [sc, laws.p_alpha(0.4), laws.marchenko_pastur(0.5), laws.rademacher()]
    pool += [centered_atomic(rng) for _ in range(6)]
    bad_im = bad_lim = 0
    for _ in range(1000):
        m = pool[int(rng.integers(len(pool)))]
        z = complex(rng.normal() * 3, rng.exponential() + 1e-3)
        if not cauchy_transform(m, z).imag < 0:
            bad_im += 1
        far = 1e6 * complex(math.cos(a := rng.uniform(0.01, math.pi - 0.01)), math.sin(a))
        if abs(far * cauchy_transform(m, far) - 1) > 1e-4:
            bad_lim += 1
    ok = sup_err <= 5e-2 and bad_im == 0 and bad_lim == 0
    accept(11, ok, f"inversion sup error {sup_err:.2e} (<= 5e-2); Im G >= 0 in {bad_im}, zG !-> 1 in {bad_lim} of 1000")
