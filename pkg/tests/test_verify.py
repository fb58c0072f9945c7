import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _helpers import uniform_grid
from boolent import ensembles as ens
from boolent import laws, verify
from boolent.errors import DomainError
from boolent.measures import Atomic, GridDensity, d_bl, symmetrize

SQ2 = math.sqrt(2.0)

distinct_positive = st.lists(st.floats(0.01, 5.0), min_size=1, max_size=8, unique=True)


class TestLogWeight:
    def test_wishart_one_by_one(self):
        wm = verify.WeightModel.wishart_singular(1, 1)
        assert verify.log_weight(wm, [1.0]) == pytest.approx(-1.0, abs=1e-15)

    def test_gue_two_by_four(self):
        wm = verify.WeightModel.conditioned_gue(2, 4)
        assert verify.log_weight(wm, [1.0, -1.0]) == pytest.approx(2 * math.log(2) - 4, abs=1e-14)

    def test_sentinels(self):
        w = verify.WeightModel.wishart_singular(2, 5)
        assert verify.log_weight(w, [0.0, 1.0]) == -math.inf
        assert verify.log_weight(w, [1.0, 1.0]) == -math.inf
        g = verify.WeightModel.conditioned_gue(2, 5)
        assert verify.log_weight(g, [0.5, 0.5]) == -math.inf
        assert verify.log_weight(g, [0.0, 0.5]) == -math.inf

    def test_wrong_size(self):
        with pytest.raises(DomainError):
            verify.log_weight(verify.WeightModel.wishart_singular(2, 5), [1.0])
        with pytest.raises(DomainError):
            verify.log_weight(verify.WeightModel.wishart_singular(1, 5), [-1.0])

    def test_invalid_models(self):
        with pytest.raises(DomainError):
            verify.WeightModel.wishart_singular(3, 2)
        with pytest.raises(DomainError):
            verify.WeightModel.conditioned_gue(0, 2)

    @settings(max_examples=50, deadline=None)
    @given(distinct_positive, st.integers(0, 50), st.randoms(use_true_random=False))
    def test_exchangeable(self, xs, extra, rnd):
        p = len(xs)
        ys = list(xs)
        rnd.shuffle(ys)
        for wm in (verify.WeightModel.wishart_singular(p, p + extra), verify.WeightModel.conditioned_gue(p, p + extra)):
            assert verify.log_weight(wm, ys) == verify.log_weight(wm, xs)

    @settings(max_examples=50, deadline=None)
    @given(distinct_positive, st.integers(0, 50))
    def test_rewritten_density(self, s, extra):
        # -p^2 iint_{x != y} f - (n - p) p int g - sum g(s_i) with
        # f = (x^2 + y^2)/2 - log|x^2 - y^2| and g = x^2 - log x^2; this form
        # carries one extra factor s_i per coordinate
        s = np.array(s)
        p, n = s.size, s.size + extra
        f = lambda x, y: 0.5 * (x * x + y * y) - math.log(abs(x * x - y * y))  # noqa: E731
        g = lambda x: x * x - math.log(x * x)  # noqa: E731
        off = sum(f(a, b) for i, a in enumerate(s) for j, b in enumerate(s) if i != j)
        form = -off - (n - p) * sum(map(g, s)) - sum(map(g, s))
        direct = verify.log_weight(verify.WeightModel.wishart_singular(p, n), s)
        assert form - np.sum(np.log(s)) == pytest.approx(direct, abs=1e-9 * max(1.0, abs(direct)))


class TestQuantiles:
    def test_uniform(self):
        d = GridDensity(0.0, 1e-3, np.ones(1001))
        q = verify.quantile_configuration(d, 9)
        np.testing.assert_allclose(q, np.arange(1, 10) / 10, atol=1e-12)

    def test_semicircle_cdf(self, semicircle):
        q = verify.quantile_configuration(semicircle, 7)
        # closed-form semicircle CDF
        F = 0.5 + (q * np.sqrt(4 - q * q) / 4 + np.arcsin(q / 2)) / np.pi
        np.testing.assert_allclose(F, np.arange(1, 8) / 8, atol=1e-5)

    def test_increasing(self):
        q = verify.quantile_configuration(laws.p_alpha(0.4), 200)
        assert np.all(np.diff(q) > 0)

    def test_atomic_rejected(self):
        with pytest.raises(DomainError):
            verify.quantile_configuration(laws.rademacher(), 3)


class TestWeightRatio:
    def test_identical_targets(self):
        wm = verify.WeightModel.wishart_singular(20, 200)
        d = uniform_grid(0.9, 1.1)
        assert verify.ldp_weight_ratio_check(wm, d, d) == (0.0, 0.0)

    def test_antisymmetric(self):
        wm = verify.WeightModel.conditioned_gue(12, 300)
        a = symmetrize(uniform_grid(1.3, 1.5))
        b = symmetrize(uniform_grid(2.3, 2.5))
        m1, p1 = verify.ldp_weight_ratio_check(wm, a, b)
        m2, p2 = verify.ldp_weight_ratio_check(wm, b, a)
        assert (m1, p1) == (-m2, -p2)

    def test_count_mismatch(self):
        wm = verify.WeightModel.wishart_singular(4, 40)
        d = uniform_grid(0.9, 1.1)
        with pytest.raises(DomainError):
            verify.ldp_weight_ratio_check(wm, d, d, quantile_count=5)

    def test_sign_agrees(self):
        wm = verify.WeightModel.wishart_singular(20, 2000)
        meas, pred = verify.ldp_weight_ratio_check(wm, uniform_grid(0.9, 1.1), uniform_grid(1.9, 2.1))
        assert meas > 0 and pred > 0


class TestDistance:
    @pytest.mark.parametrize("p", [0.0, 0.3, 0.5, 1.0])
    def test_member(self, p):
        dist, pstar = verify.distance_to_m0(verify.two_point(p))
        assert dist == pytest.approx(0.0, abs=1e-6)
        assert pstar == pytest.approx(p, abs=1e-5)

    def test_matches_fine_grid(self, rng):
        m = Atomic(rng.normal(size=6) * 0.3 + np.repeat([-SQ2, SQ2], 3), np.full(6, 1 / 6))
        fine = min(d_bl(m, verify.two_point(p)) for p in np.linspace(0, 1, 1001))
        dist, _ = verify.distance_to_m0(m)
        assert dist <= fine + 1e-9
        assert dist >= fine - 1e-3

    def test_two_point_clips(self):
        assert verify.two_point(1.5) == verify.two_point(1.0)


class TestConvergence:
    def test_single_replica(self):
        cfg = ens.EnsembleConfig(ens.WishartBlock(10, 100), 0)
        out = verify.convergence_stats(cfg, 1, base_seed=4)
        rec = out["replicas"][0]
        assert rec["seed"] == 4
        for k in ("d_bl_rademacher", "m2", "m4"):
            assert out["aggregate"][f"mean_{k}"] == rec[k]
        assert out["aggregate"]["n_ok"] == 1 and out["aggregate"]["n_failed"] == 0

    def test_gue_records(self):
        cfg = ens.EnsembleConfig(ens.ConditionedGUE(4, 100), 0, ens.MCMCParams(200, 200))
        out = verify.convergence_stats(cfg, 2)
        assert {"d_bl_m0", "p_star", "mass_alpha", "m2", "m4"} <= set(out["replicas"][0])
        assert [r["seed"] for r in out["replicas"]] == [0, 1]

    def test_parallel_matches_serial(self, monkeypatch):
        cfg = ens.EnsembleConfig(ens.WishartBlock(6, 60), 0)
        monkeypatch.setenv("BEL_THREADS", "1")
        serial = verify.convergence_stats(cfg, 3)
        monkeypatch.setenv("BEL_THREADS", "2")
        parallel = verify.convergence_stats(cfg, 3)
        assert serial == parallel

    def test_errors_recorded(self, monkeypatch):
        def boom(cfg):
            raise DomainError("synthetic")

        monkeypatch.setattr(ens, "sample_wishart_block", boom)
        out = verify.convergence_stats(ens.EnsembleConfig(ens.WishartBlock(2, 4)), 2)
        assert out["aggregate"]["n_failed"] == 2
        assert all("synthetic" in r["error"] for r in out["replicas"])

    def test_invalid(self):
        with pytest.raises(DomainError):
            verify.convergence_stats(ens.EnsembleConfig(ens.WishartBlock(2, 4)), 0)
