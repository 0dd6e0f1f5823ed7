import math

import numpy as np
import pytest

from aerointerf.field import (RNG_ALGORITHM, ShadowingSpec, SimulationSpec,
                              aggregate_interference, campbell_target, default_r_max,
                              monte_carlo_profile, realization_rng, sample_field,
                              synthesize_profile)
from aerointerf.model import EnvironmentParams, mean_interference, truncation_tail

from conftest import campaign_params


@pytest.fixture(scope="module")
def generator():
    return campaign_params("2024", "5G n5 DL")


class TestSampleField:
    def test_expected_count(self):
        env = EnvironmentParams()
        spec = SimulationSpec(r_max=2000.0)
        counts = np.array([sample_field(env, spec, i).size for i in range(10_000)])
        expected = math.pi * 1e-3 * (2000.0 ** 2 - 400.0)
        assert expected == pytest.approx(12565.1, abs=0.1)
        se = math.sqrt(expected / counts.size)
        assert abs(counts.mean() - expected) <= 3 * se
        # Poisson: variance equals mean
        assert counts.var(ddof=1) / expected == pytest.approx(1.0, abs=0.05)

    def test_support(self):
        env = EnvironmentParams(r0=20.0)
        spec = SimulationSpec(r_max=300.0)
        for i in range(200):
            r = sample_field(env, spec, i)
            assert np.all(r >= 20.0) and np.all(r <= 300.0)

    def test_radial_density(self):
        # P(r <= R) = (R^2 - r0^2) / (r_max^2 - r0^2) for density proportional to r
        env = EnvironmentParams()
        spec = SimulationSpec(r_max=500.0)
        r = np.concatenate([sample_field(env, spec, i) for i in range(300)])
        frac = np.mean(r <= 250.0)
        expected = (250.0 ** 2 - 400.0) / (500.0 ** 2 - 400.0)
        assert abs(frac - expected) <= 4 * math.sqrt(expected * (1 - expected) / r.size)

    def test_vanishing_annulus(self):
        env = EnvironmentParams()
        spec = SimulationSpec(r_max=20.0 + 1e-9)
        assert sum(sample_field(env, spec, i).size for i in range(1000)) == 0

    def test_reproducible_and_distinct(self):
        env = EnvironmentParams()
        spec = SimulationSpec(r_max=200.0, rng_seed=99)
        np.testing.assert_array_equal(sample_field(env, spec, 3), sample_field(env, spec, 3))
        assert not np.array_equal(sample_field(env, spec, 3), sample_field(env, spec, 4))

    def test_guard_radius_must_be_inside_disc(self):
        with pytest.raises(ValueError):
            sample_field(EnvironmentParams(r0=20.0), SimulationSpec(r_max=10.0))


class TestShadowingSpec:
    def test_unit_mean(self):
        s = ShadowingSpec(6.0)
        assert s.sigma_ln == pytest.approx(6.0 * math.log(10) / 10)
        assert s.mu_ln == pytest.approx(-0.5 * s.sigma_ln ** 2)
        draws = realization_rng(0, 0).lognormal(s.mu_ln, s.sigma_ln, 400_000)
        se = draws.std() / math.sqrt(draws.size)
        assert abs(draws.mean() - 1.0) <= 4 * se

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ShadowingSpec(-1.0)


class TestSimulationSpec:
    @pytest.mark.parametrize("kwargs", [dict(realizations=0), dict(realizations=2.5),
                                        dict(rng_seed=-1), dict(rng_seed=1 << 64),
                                        dict(noise_floor=-1.0), dict(r_max=math.inf)])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            SimulationSpec(**kwargs)

    def test_max_seed_accepted(self):
        SimulationSpec(rng_seed=(1 << 64) - 1)


class TestAggregateInterference:
    def test_campbell_at_60m(self, generator, env):
        spec = SimulationSpec(realizations=100_000)
        est = aggregate_interference(generator, env, ShadowingSpec(0.0), spec, 60.0)
        target = campbell_target(generator, env, spec, 60.0)
        assert abs(est.mean - target) <= 3 * est.std_error
        assert est.rng == RNG_ALGORITHM

    def test_campbell_on_full_grid(self, generator, env, grid):
        spec = SimulationSpec(realizations=100_000)
        _, estimates = monte_carlo_profile(generator, env, ShadowingSpec(0.0), spec, grid)
        for h, est in zip(grid.altitudes(), estimates):
            target = campbell_target(generator, env, spec, h)
            rel = abs(est.mean / target - 1)
            assert rel <= max(0.02, 3 * est.std_error / est.mean), h

    def test_shadowing_mean_invariance(self, generator, env):
        spec = SimulationSpec(realizations=100_000, rng_seed=7)
        est = {s: aggregate_interference(generator, env, ShadowingSpec(s), spec, 60.0)
               for s in (0.0, 3.0, 6.0, 9.0)}
        base = est[0.0]
        for s in (3.0, 6.0, 9.0):
            assert abs(est[s].mean - base.mean) <= 3 * math.hypot(est[s].std_error, base.std_error)
        # spread grows with sigma even though the mean does not move
        assert est[9.0].std_error > est[3.0].std_error > base.std_error

    def test_empty_field_is_noise_floor(self, generator):
        env = EnvironmentParams(lambda_=1e-30)
        spec = SimulationSpec(realizations=50, noise_floor=3.25e-12)
        est = aggregate_interference(generator, env, ShadowingSpec(6.0), spec, 40.0)
        assert est.mean == 3.25e-12
        assert est.std_error == 0.0

    def test_noise_floor_adds(self, generator, env):
        spec = SimulationSpec(realizations=500)
        a = aggregate_interference(generator, env, ShadowingSpec(0.0), spec, 40.0)
        b = aggregate_interference(generator, env, ShadowingSpec(0.0),
                                   SimulationSpec(realizations=500, noise_floor=1e-9), 40.0)
        assert b.mean == pytest.approx(a.mean + 1e-9, rel=1e-15)
        assert b.std_error == a.std_error

    def test_bit_identical_across_runs_and_threads(self, generator, env):
        spec = SimulationSpec(realizations=3000, rng_seed=2**63 + 5)
        shadow = ShadowingSpec(6.0)
        ref = aggregate_interference(generator, env, shadow, spec, 75.0)
        assert aggregate_interference(generator, env, shadow, spec, 75.0) == ref
        for workers in (2, 3, 8):
            assert aggregate_interference(generator, env, shadow, spec, 75.0, workers) == ref

    def test_seed_changes_estimate(self, generator, env):
        a = aggregate_interference(generator, env, ShadowingSpec(0.0),
                                   SimulationSpec(realizations=200, rng_seed=1), 40.0)
        b = aggregate_interference(generator, env, ShadowingSpec(0.0),
                                   SimulationSpec(realizations=200, rng_seed=2), 40.0)
        assert a.mean != b.mean

    def test_density_doubles_both(self, generator):
        spec = SimulationSpec(realizations=20_000)
        env1, env2 = EnvironmentParams(lambda_=1e-3), EnvironmentParams(lambda_=2e-3)
        m1 = aggregate_interference(generator, env1, ShadowingSpec(0.0), spec, 60.0)
        m2 = aggregate_interference(generator, env2, ShadowingSpec(0.0), spec, 60.0)
        assert mean_interference(generator, env2, 60.0) == pytest.approx(
            2 * mean_interference(generator, env1, 60.0), rel=1e-15)
        assert m2.mean / m1.mean == pytest.approx(2.0, rel=0.03)

    def test_profile_bins_match_single_altitude(self, generator, env):
        spec = SimulationSpec(realizations=400)
        shadow = ShadowingSpec(3.0)
        prof, est = monte_carlo_profile(generator, env, shadow, spec, [10.0, 85.0])
        assert est[1] == aggregate_interference(generator, env, shadow, spec, 85.0)
        assert prof.powers[0] == est[0].mean


class TestTruncation:
    def test_default_radius_meets_tail_budget(self, generator, env):
        r = default_r_max(generator, env, 10.0)
        tail = truncation_tail(generator, env, 10.0, r)
        assert tail / mean_interference(generator, env, 10.0) <= 1e-4
        # and it is the smallest such radius, to rounding
        tail_less = truncation_tail(generator, env, 10.0, r * (1 - 1e-9))
        assert tail_less / mean_interference(generator, env, 10.0) > 1e-4 * (1 - 1e-6)

    def test_higher_altitudes_have_heavier_tails(self, generator, env):
        frac = [truncation_tail(generator, env, h, 500.0) / mean_interference(generator, env, h)
                for h in (10.0, 160.0)]
        assert frac[1] > frac[0]


class TestSynthesizeProfile:
    def test_exact_forward_model(self, generator, env, grid):
        prof = synthesize_profile(generator, env, grid)
        assert len(prof) == 31
        assert prof.altitudes == tuple(float(h) for h in range(10, 161, 5))
        np.testing.assert_array_equal(prof.y, mean_interference(generator, env, grid.altitudes()))

    def test_noise_floor(self, generator, env, grid):
        prof = synthesize_profile(generator, env, grid, noise_floor=1e-10)
        np.testing.assert_allclose(prof.y, mean_interference(generator, env, grid.altitudes()) + 1e-10,
                                   rtol=1e-15)

    def test_jitter_is_seeded(self, generator, env, grid):
        a = synthesize_profile(generator, env, grid, jitter_db=0.5, seed=11)
        b = synthesize_profile(generator, env, grid, jitter_db=0.5, seed=11)
        c = synthesize_profile(generator, env, grid, jitter_db=0.5, seed=12)
        assert a == b and a != c
        shift = 10 * np.log10(a.y / mean_interference(generator, env, grid.altitudes()))
        assert 0.2 < shift.std() < 0.9

    def test_rejects_bad_grid(self, generator, env):
        with pytest.raises(ValueError):
            synthesize_profile(generator, env, [])
        with pytest.raises(ValueError):
            synthesize_profile(generator, env, [10.0, 10.0, 20.0])
