import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twohop.analytic import (AnalyticInputs, BudgetExceeded, ClusterIntensity, QuadratureConfig,
                             SecondHop, UnsupportedPolicy, beta, beta_integral,
                             beta_integral_closed_form, beta_tilde, delta_oriented, delta_tilde,
                             evaluate, p1, p_success)
from twohop.geometry import ParameterError, PathLossModel
from twohop.policies import (AllTransmit, CenterBaseline, DistanceThinning, RssThinning,
                             Sectorized)
from twohop.simulation import SimulationConfig, estimate

FAST = QuadratureConfig(panels_per_cluster=8)
M1 = AnalyticInputs(0.1, 1.0, 1.0)


class TestBeta:
    def test_values(self):
        assert beta(1.0, 1.0, 1.0, PathLossModel()) == 0.5
        assert beta(1.0, 1.0, 3.0, PathLossModel()) == 0.75
        assert beta(1.0, 1e6, 3.0, PathLossModel()) < 1e-20

    @given(st.floats(0.01, 50), st.floats(0.01, 50), st.floats(1.01, 20))
    def test_in_unit_interval(self, x, y, T):
        assert 0.0 <= beta(x, y, T, PathLossModel(3.5)) <= 1.0


class TestBetaIntegral:
    def test_reference_value(self):
        # pi * sqrt(3) * Gamma(3/2) * Gamma(1/2) = pi^2 sqrt(3) / 2
        expected = math.pi ** 2 * math.sqrt(3) / 2
        assert beta_integral_closed_form(1.0, 3.0, 4.0) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(8.547328, rel=1e-6)
        assert beta_integral(1.0, 3.0, PathLossModel(4.0)) == pytest.approx(expected, rel=1e-6)

    @pytest.mark.parametrize("alpha", [3.0, 4.0, 6.0])
    def test_d_squared_scaling(self, alpha):
        m = PathLossModel(alpha)
        assert beta_integral(2.0, 3.0, m) == pytest.approx(4 * beta_integral(1.0, 3.0, m), rel=1e-6)

    def test_alpha_three_gamma_pair(self):
        from scipy.special import gamma
        ref = math.pi * 3 ** (2 / 3) * gamma(5 / 3) * gamma(1 / 3)
        assert beta_integral(1.0, 3.0, PathLossModel(3.0)) == pytest.approx(ref, rel=1e-6)

    def test_convergence_under_tighter_tolerance(self):
        m = PathLossModel(3.0)
        coarse = beta_integral(1.3, 2.0, m, QuadratureConfig(rel_tol=1e-4))
        fine = beta_integral(1.3, 2.0, m, QuadratureConfig(rel_tol=5e-5))
        assert abs(coarse - fine) / fine < 1e-4

    def test_bounded_model(self):
        unb, bnd = PathLossModel(4.0), PathLossModel(4.0, bounded=True)
        # a capped signal (d < 1) makes outage more likely
        assert beta_integral(0.5, 3.0, bnd) > beta_integral(0.5, 3.0, unb)
        # for d >= 1 only nearby interferers are capped, which helps
        assert beta_integral(1.5, 3.0, bnd) < beta_integral(1.5, 3.0, unb)

    def test_rejects_nonpositive_distance(self):
        with pytest.raises(ParameterError):
            beta_integral(0.0, 3.0, PathLossModel())


class TestPSuccess:
    def test_reference(self):
        assert p1(M1) == pytest.approx(math.exp(-0.1 * math.pi ** 2 * math.sqrt(3) / 2), rel=1e-6)
        assert p1(M1) == pytest.approx(0.42540, abs=1e-5)

    def test_no_sources(self):
        assert p_success(3.0, AnalyticInputs(0.0, 1.0, 1.0)) == 1.0

    @given(st.floats(0.05, 5), st.floats(0.05, 5), st.floats(0.01, 1), st.floats(1.1, 10))
    @settings(max_examples=40, deadline=None)
    def test_monotone(self, d1, d2, lam, T):
        d1, d2 = sorted((d1, d2))
        if d2 - d1 < 1e-3:
            return
        inp = AnalyticInputs(lam, 1.0, 1.0, T)
        assert p_success(d1, inp) > p_success(d2, inp)
        assert p_success(d1, AnalyticInputs(lam * 1.5, 1.0, 1.0, T)) < p_success(d1, inp)
        assert p_success(d1, AnalyticInputs(lam, 1.0, 1.0, T * 1.5)) < p_success(d1, inp)

    def test_vanishes_far_away(self):
        vals = p_success(np.array([1.0, 5.0, 20.0]), M1)
        assert vals[-1] < 1e-100


class TestClusterIntensity:
    z = np.array([[0.3, 0.1], [1.0, -0.4], [0.0, 2.0], [2.5, 1.5]])

    @pytest.mark.parametrize("pol", [RssThinning(0.0), Sectorized(math.pi), DistanceThinning(0.0)])
    def test_reduces_to_all_transmit(self, pol):
        ref = delta_tilde(self.z, M1)
        other = delta_tilde(self.z, AnalyticInputs(0.1, 1.0, 1.0, policy=pol))
        assert np.allclose(other, ref, rtol=1e-12, atol=0)

    def test_bounded_by_lambda_r(self):
        for pol in (AllTransmit(), RssThinning(0.5), Sectorized(1.0), DistanceThinning(0.5)):
            v = delta_tilde(self.z, AnalyticInputs(0.1, 2.0, 1.0, policy=pol))
            assert np.all((v >= 0) & (v <= 2.0))

    def test_method1_is_lambda_times_p(self):
        d = np.hypot(*self.z.T)
        assert np.allclose(delta_tilde(self.z, M1), p_success(d, M1))

    def test_rss_thinning_decreases_intensity(self):
        lo = delta_tilde(self.z, AnalyticInputs(0.1, 1.0, 1.0, policy=RssThinning(0.1)))
        hi = delta_tilde(self.z, AnalyticInputs(0.1, 1.0, 1.0, policy=RssThinning(1.0)))
        assert np.all(hi <= lo)

    def test_oriented_sector_averages_to_isotropic(self):
        inp = AnalyticInputs(0.1, 1.0, 1.0, policy=Sectorized(math.pi / 4))
        nu = np.linspace(-math.pi, math.pi, 20001)[:-1]
        pts = 0.8 * np.stack([np.cos(nu), np.sin(nu)], axis=-1)
        assert delta_oriented(pts, inp).mean() == pytest.approx(delta_tilde([0.8, 0.0], inp),
                                                                rel=1e-3)

    def test_oriented_distance_averages_to_isotropic(self):
        inp = AnalyticInputs(0.1, 1.0, 1.0, policy=DistanceThinning(1.5))
        nu = np.linspace(-math.pi, math.pi, 4001)[:-1]
        pts = 0.6 * np.stack([np.cos(nu), np.sin(nu)], axis=-1)
        assert delta_oriented(pts, inp).mean() == pytest.approx(delta_tilde([0.6, 0.0], inp),
                                                                rel=1e-6)

    def test_mean_size_oracle(self):
        # Method 1 unbounded: int lambda_r exp(-lambda_s K d^2) 2 pi d dd = pi / (lambda_s K)
        K = math.pi ** 2 * math.sqrt(3) / 2
        assert ClusterIntensity(M1).mean_size == pytest.approx(math.pi / (0.1 * K), rel=1e-6)

    def test_unbounded_without_sources(self):
        with pytest.raises(ParameterError):
            ClusterIntensity(AnalyticInputs(0.0, 1.0, 1.0)).radius


class TestBetaTilde:
    @pytest.mark.parametrize("s, rho", [(0.5, 0.0), (1.0, 1.0), (0.7, 3.0)])
    def test_matches_riemann_sum(self, s, rho):
        # brute force: int beta(s, |y|) D(|y + xi|) dy, midpoint rule about the cluster centre
        h, half = 0.01, 6.0
        u = np.arange(-half + h / 2, half, h)
        X, Y = np.meshgrid(u, u, indexing="ij")
        # y = (X, Y) - xi with xi = (rho, 0), so y + xi = (X, Y)
        D = ClusterIntensity(M1)(np.hypot(X, Y))
        b = beta(s, np.hypot(X - rho, Y), 3.0, PathLossModel())
        brute = float(np.sum(b * D) * h * h)
        assert beta_tilde([s, 0.0], [rho, 0.0], M1) == pytest.approx(brute, rel=1e-3)

    def test_zero_relays(self):
        assert beta_tilde([1.0, 0.0], [0.5, 0.0], AnalyticInputs(0.1, 0.0, 1.0)) == 0.0

    def test_vanishing_sector(self):
        inp = AnalyticInputs(0.1, 1.0, 1.0, policy=Sectorized(1e-6))
        assert beta_tilde([1.0, 0.0], [0.5, 0.0], inp) < 1e-6


class TestSecondHop:
    def test_no_relays(self):
        r = evaluate(AnalyticInputs(0.1, 0.0, 1.0))
        assert r.P2 == 0.0 and r.Ps == r.P1

    def test_policy_reductions_share_p2(self):
        ref = SecondHop(M1, FAST).evaluate()[0]
        assert ref == pytest.approx(0.258122, abs=2e-6)
        for pol in (RssThinning(0.0), DistanceThinning(0.0)):
            inp = AnalyticInputs(0.1, 1.0, 1.0, policy=pol)
            assert SecondHop(inp, FAST).evaluate()[0] == pytest.approx(ref, rel=1e-12)

    def test_increasing_in_relay_density_near_zero(self):
        vals = [SecondHop(AnalyticInputs(0.1, lr, 1.0), FAST).evaluate()[0]
                for lr in (0.05, 0.1)]
        assert 0 < vals[0] < vals[1]

    def test_budget_exceeded(self):
        q = QuadratureConfig(max_evaluations=1000)
        with pytest.raises(BudgetExceeded) as info:
            evaluate(M1, q)
        assert info.value.achieved_tolerance is not None

    def test_single_pass(self):
        r = evaluate(AnalyticInputs(0.05, 0.5, 2.0), QuadratureConfig(max_refinements=0))
        assert math.isnan(r.achieved_tolerance)
        assert 0 < r.P2 < 1

    def test_refinement_reports_tolerance(self):
        r = evaluate(AnalyticInputs(0.05, 0.5, 2.0))
        assert r.achieved_tolerance <= 1e-3
        assert r.Ps == pytest.approx(1 - (1 - r.P1) * (1 - r.P2))

    def test_center_baseline_unsupported(self):
        with pytest.raises(UnsupportedPolicy):
            AnalyticInputs(0.1, 1.0, 1.0, policy=CenterBaseline())

    def test_own_cluster_modes_differ_for_sector(self):
        # isotropic treatment of the tagged cluster spreads its relays away
        # from the destination; the oriented form keeps them in the sector
        base = dict(lambda_s=0.05, lambda_r=1.0, R=2.0, policy=Sectorized(math.pi / 4))
        oriented = SecondHop(AnalyticInputs(**base, own_cluster="oriented"), FAST).evaluate()[0]
        averaged = SecondHop(AnalyticInputs(**base, own_cluster="averaged"), FAST).evaluate()[0]
        assert oriented == pytest.approx(0.35850, abs=1e-4)
        assert averaged == pytest.approx(0.17118, abs=1e-4)


class TestAgainstSimulation:
    def test_cluster_size(self):
        cfg = SimulationConfig(0.1, 1.0, 1.0, half_width=15.0, guard_margin=5.0, n_trials=100,
                               master_seed=1)
        est = estimate(cfg)
        size = ClusterIntensity(M1).mean_size
        assert abs(est.mean_cluster_size - size) < 3 * est.se_cluster_size

    def test_cluster_size_sector(self):
        pol = Sectorized(math.pi / 4)
        cfg = SimulationConfig(0.1, 1.0, 1.0, half_width=15.0, guard_margin=5.0, n_trials=60,
                               master_seed=2, policy=pol)
        est = estimate(cfg)
        size = ClusterIntensity(AnalyticInputs(0.1, 1.0, 1.0, policy=pol)).mean_size
        assert abs(est.mean_cluster_size - size) < 3 * est.se_cluster_size

    def test_method1_p2(self):
        an = SecondHop(AnalyticInputs(0.05, 0.5, 2.0), FAST).evaluate()[0]
        est = estimate(SimulationConfig(0.05, 0.5, 2.0, half_width=20.0, guard_margin=8.0,
                                        n_trials=100, master_seed=1))
        assert abs(est.P2_hat - an) < 3 * est.se_P2
