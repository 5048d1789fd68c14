import math

import numpy as np
import pytest

from _oracles import quenched_field_p0, scale_function_exit_probability
from suvlab.dynamics import IntegratorConfig, SuvParams, evolve_trajectory
from suvlab.ensemble import (EnsembleConfig, born_statistics_test,
                             frozen_noise_exit_probability, gj_ratio_sweep,
                             martingale_check, run_ensemble, scaling_sweep,
                             tau_sweep)
from suvlab.errors import HorizonTooShortError
from suvlab.noise import ConstantField, OrnsteinUhlenbeck, WhiteNoise, sample_white


def make_config(theta0, m=500, seed=900, noise=None, dt=1e-4, max_time=30.0,
                record_stride=100, **params):
    return EnsembleConfig(
        m=m, theta0=theta0, params=SuvParams(**params),
        noise=noise if noise is not None else WhiteNoise(),
        integrator=IntegratorConfig(dt=dt, max_time=max_time),
        seed=seed, record_stride=record_stride)


class TestRunEnsemble:
    def test_absorbed_start_counts_and_times(self):
        res = run_ensemble(make_config(0.0, m=100))
        assert res.count_pole0 == 100
        assert res.count_pole1 == res.count_unresolved == 0
        assert np.all(res.collapse_times == 0.0)
        assert np.all(res.mean_sigma_z == 1.0)

    def test_counts_sum_to_m(self):
        res = run_ensemble(make_config(math.pi / 2, m=300, max_time=25.0))
        assert res.count_pole0 + res.count_pole1 + res.count_unresolved == 300

    def test_equator_splits_evenly(self):
        m = 2000
        res = run_ensemble(make_config(math.pi / 2, m=m, seed=901, max_time=40.0))
        se = math.sqrt(0.25 / m)
        assert abs(res.empirical_p0 - 0.5) < 4 * se

    def test_same_seed_reproduces_bit_identical(self):
        a = run_ensemble(make_config(math.pi / 3, m=64, max_time=15.0))
        b = run_ensemble(make_config(math.pi / 3, m=64, max_time=15.0))
        assert a.count_pole0 == b.count_pole0
        assert np.array_equal(a.collapse_times, b.collapse_times, equal_nan=True)
        assert np.array_equal(a.mean_sigma_z, b.mean_sigma_z)

    def test_worker_count_does_not_change_results(self):
        cfg = make_config(math.pi / 3, m=1200, max_time=12.0, seed=903)
        serial = run_ensemble(cfg, workers=1)
        threaded = run_ensemble(cfg, workers=3)
        assert serial.count_pole0 == threaded.count_pole0
        assert np.array_equal(serial.collapse_times, threaded.collapse_times,
                              equal_nan=True)
        assert np.array_equal(serial.mean_sigma_z, threaded.mean_sigma_z)

    def test_trajectory_level_agreement_with_path_api(self):
        # ensemble trajectory i must equal a standalone run against the
        # materialized sub-seeded noise path
        cfg = make_config(math.pi / 3, m=8, seed=904, max_time=20.0)
        res = run_ensemble(cfg)
        for i in range(cfg.m):
            path = sample_white(cfg.integrator.dt, cfg.integrator.n_steps,
                                seed=[cfg.seed, i])
            traj = evolve_trajectory(cfg.theta0, cfg.params, path, cfg.integrator)
            expected = {"pole0": 1, "pole1": -1}.get(traj.outcome, 0)
            tc = res.collapse_times[i]
            assert traj.collapse_time == pytest.approx(tc, abs=0.0)
            final_z = math.cos(traj.thetas[-1])
            assert math.copysign(1, final_z) == expected

    def test_unresolved_are_counted_not_dropped(self):
        # horizon far too short for collapse from the equator
        res = run_ensemble(make_config(math.pi / 2, m=50, max_time=0.01))
        assert res.count_unresolved == 50
        assert np.all(np.isnan(res.collapse_times))

    def test_mean_series_within_physical_range(self):
        res = run_ensemble(make_config(1.0, m=200, max_time=20.0))
        assert np.all(res.mean_sigma_z <= 1.0) and np.all(res.mean_sigma_z >= -1.0)
        assert res.record_times[0] == 0.0
        assert res.mean_sigma_z[0] == pytest.approx(math.cos(1.0), abs=1e-12)


class TestBornTest:
    def test_symmetric_case_passes(self):
        res = run_ensemble(make_config(math.pi / 2, m=1500, seed=905, max_time=40.0))
        test = born_statistics_test(res)
        assert test.expected_p0 == pytest.approx(0.5)
        assert test.passed

    def test_z_score_formula(self):
        res = run_ensemble(make_config(math.pi / 3, m=400, seed=906))
        test = born_statistics_test(res)
        se = math.sqrt(0.75 * 0.25 / 400)
        assert test.z_score == pytest.approx(
            (test.empirical_p0 - 0.75) / se, abs=1e-12)

    def test_unresolved_horizon_raises(self):
        res = run_ensemble(make_config(math.pi / 2, m=50, max_time=0.01))
        with pytest.raises(HorizonTooShortError):
            born_statistics_test(res)


class TestMartingale:
    def test_absorbed_start_has_zero_deviation(self):
        res = run_ensemble(make_config(0.0, m=50))
        assert martingale_check(res) == 0.0

    def test_white_unit_ratio_conserves_statistics(self):
        m = 2000
        res = run_ensemble(make_config(math.pi / 3, m=m, seed=907, max_time=40.0))
        bound = 4.0 * math.sqrt((1 - math.cos(math.pi / 3) ** 2) / m)
        assert martingale_check(res) < bound

    def test_noise_dominated_regime_breaks_conservation(self):
        # G/J = 100: the ensemble mean is pulled toward the equator
        m = 400
        res = run_ensemble(make_config(
            math.pi / 3, m=m, seed=908, G=100.0, dt=1e-6, max_time=0.5))
        bound = 4.0 * math.sqrt((1 - math.cos(math.pi / 3) ** 2) / m)
        assert martingale_check(res) > bound


class TestGjRatioSweep:
    def test_nonlinear_regime_is_deterministic_per_hemisphere(self):
        base = make_config(math.pi / 3, m=200, seed=909)
        rows = gj_ratio_sweep([0.01], math.pi / 3, base)
        assert rows[0].empirical_p0 == 1.0
        rows = gj_ratio_sweep([0.01], 2 * math.pi / 3, base)
        assert rows[0].empirical_p0 == 0.0

    def test_noise_dominated_regime_matches_scale_function(self):
        # the absorbing pole band keeps a logarithmic memory of theta0;
        # the independent quadrature oracle gives the exit probability
        base = make_config(math.pi / 6, m=2000, seed=910, max_time=5.0)
        rows = gj_ratio_sweep([100.0], math.pi / 6, base)
        oracle = scale_function_exit_probability(math.pi / 6, 1.0, 100.0, 1e-3)
        se = math.sqrt(oracle * (1 - oracle) / 2000)
        assert oracle == pytest.approx(0.5867, abs=2e-3)
        assert abs(rows[0].empirical_p0 - oracle) < 4 * se + 0.01

    def test_timestep_rescaled_for_fast_noise(self):
        base = make_config(math.pi / 6, m=4, seed=911, max_time=2.0)
        rows = gj_ratio_sweep([100.0], math.pi / 6, base)
        assert rows[0].count_unresolved == 0


class TestTauSweep:
    def test_near_white_recovers_born_and_correlated_breaks_it(self):
        base = make_config(math.pi / 3, m=1500, seed=912, max_time=50.0)
        rows = tau_sweep([1e-4, 1.0], math.pi / 3, base)
        near_white, correlated = rows
        assert abs(near_white.deviation_sigma) < 4.0
        assert abs(correlated.deviation_sigma) > 5.0
        # the correlated field favors the nearer pole
        assert correlated.empirical_p0 > near_white.empirical_p0

    def test_frozen_limit_matches_quenched_oracle(self):
        theta0 = 1.45
        tau = 100.0
        base = make_config(theta0, m=800, seed=913, max_time=60.0)
        rows = tau_sweep([tau], theta0, base)
        oracle = quenched_field_p0(theta0, tau)
        assert frozen_noise_exit_probability(theta0, tau) == pytest.approx(oracle)
        assert rows[0].empirical_p0 == pytest.approx(oracle, abs=0.03)


class TestScalingSweep:
    def test_deterministic_scaling_slope_is_inverse(self):
        base = make_config(math.pi / 3, m=4, noise=ConstantField(0.0), G=0.0)
        rows, slope = scaling_sweep([1.0, 2.0, 4.0, 8.0], math.pi / 3, base)
        assert slope == pytest.approx(-1.0, abs=0.05)
        assert rows[0].median_collapse_time == pytest.approx(
            2 * rows[1].median_collapse_time, rel=0.02)

    def test_near_pole_start_collapses_faster(self):
        base = make_config(math.pi / 3, m=2, noise=ConstantField(0.0), G=0.0)
        near, _ = scaling_sweep([1.0], math.pi / 100, base)
        far, _ = scaling_sweep([1.0], math.pi / 3, base)
        assert near[0].median_collapse_time < far[0].median_collapse_time

    def test_equator_rejected_in_deterministic_mode(self):
        base = make_config(math.pi / 3, m=2, noise=ConstantField(0.0), G=0.0)
        with pytest.raises(ValueError):
            scaling_sweep([1.0], math.pi / 2, base)
