import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aerointerf.errors import InsufficientData
from aerointerf.estimation import (FitOptions, FitResult, _tie_broken_argmin, fit_profile,
                                   profiled_scale)
from aerointerf.field import synthesize_profile
from aerointerf.model import EnvironmentParams, LosTransition, ModelParams, PathLossPair
from aerointerf.profiles import AltitudeProfile

from conftest import campaign_params


@pytest.fixture(scope="module")
def n5_2024():
    params = campaign_params("2024", "5G n5 DL")
    return params, synthesize_profile(params, EnvironmentParams(), range(10, 161, 5),
                                      band="5G n5 DL", year="2024")


class TestNoiselessRecovery:
    def test_generator_recovered(self, n5_2024):
        params, prof = n5_2024
        fit = fit_profile(prof)
        assert fit.beta == pytest.approx(0.08, abs=0.005)
        assert fit.h0 == pytest.approx(14.3, abs=1.0)
        assert fit.c_tilde == pytest.approx(1.11, rel=0.01)
        assert (fit.band, fit.year, fit.n_bins, fit.degenerate) == ("5G n5 DL", "2024", 31, False)

    def test_perfect_fit_metrics(self, n5_2024):
        fit = fit_profile(n5_2024[1])
        assert fit.rmse_db < 1e-6
        assert fit.r2_db == pytest.approx(1.0, abs=1e-12)
        assert fit.r2_lin == pytest.approx(1.0, abs=1e-12)

    def test_linear_domain_fit(self, n5_2024):
        fit = fit_profile(n5_2024[1], options=FitOptions(domain="linear"))
        assert fit.fit_domain == "linear"
        assert fit.beta == pytest.approx(0.08, abs=0.005)
        assert fit.h0 == pytest.approx(14.3, abs=1.0)

    def test_refinement_never_worse_than_grid(self, n5_2024):
        fit = fit_profile(n5_2024[1])
        assert fit.objective <= fit.grid_objective

    def test_scaling_powers_scales_activity(self, n5_2024):
        prof = n5_2024[1]
        base = fit_profile(prof)
        scaled = fit_profile(prof.scaled(1000.0))
        assert scaled.params.c_eff == pytest.approx(1000.0 * base.params.c_eff, rel=1e-6)
        assert scaled.beta == pytest.approx(base.beta, rel=1e-6)

    def test_known_noise_floor_removed(self):
        env = EnvironmentParams()
        params = campaign_params("2025", "LTE B13 DL")
        floor = 2e-10
        prof = synthesize_profile(params, env, range(10, 161, 5), noise_floor=floor)
        fit = fit_profile(prof, options=FitOptions(noise_floor=floor))
        assert fit.beta == pytest.approx(0.16, abs=0.005)
        assert fit.h0 == pytest.approx(19.3, abs=1.0)
        assert fit.rmse_db < 1e-6

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.01, 1.0), st.floats(-60.0, 120.0))
    def test_any_generator_is_reproduced(self, beta, h0):
        params = ModelParams(LosTransition(beta, h0), 1e-6, PathLossPair())
        prof = synthesize_profile(params, EnvironmentParams(), range(10, 161, 5))
        assert fit_profile(prof).rmse_db < 0.01


class TestProfiledScale:
    @pytest.mark.parametrize("domain", ["db", "linear"])
    def test_exact_inner_solve(self, domain):
        t = LosTransition(0.08, 23.7)
        params = ModelParams(t, 7.0, PathLossPair())
        prof = synthesize_profile(params, EnvironmentParams(), range(10, 161, 5))
        k = profiled_scale(prof, t, PathLossPair(), EnvironmentParams(), domain)
        assert k == pytest.approx(7.0, rel=1e-13)

    def test_domains_agree_on_noiseless_data(self):
        t = LosTransition(0.35, 27.0)
        prof = synthesize_profile(ModelParams(t, 3e-7, PathLossPair()), EnvironmentParams(),
                                  range(10, 161, 5))
        a = profiled_scale(prof, t, PathLossPair(), EnvironmentParams(), "db")
        b = profiled_scale(prof, t, PathLossPair(), EnvironmentParams(), "linear")
        assert a == pytest.approx(b, rel=1e-13)

    def test_db_scale_is_geometric_mean_ratio(self):
        t = LosTransition(0.1, 30.0)
        env = EnvironmentParams()
        prof = AltitudeProfile("x", "1", (10.0, 20.0, 30.0), (1e-9, 4e-9, 2e-9))
        from aerointerf.model import shape_function
        d = shape_function(t, PathLossPair(), env, prof.h)
        expected = math.exp(np.mean(np.log(prof.y / d)))
        assert profiled_scale(prof, t, PathLossPair(), env) == pytest.approx(expected, rel=1e-12)


class TestDegenerate:
    def test_flat_profile(self):
        prof = AltitudeProfile("LTE B13 UL", "2024", tuple(range(10, 161, 5)), (2.5e-10,) * 31)
        fit = fit_profile(prof)
        assert fit.degenerate
        assert fit.beta == 1e-3 <= 0.01
        assert fit.r2_db is None and fit.r2_lin is None
        assert math.isfinite(fit.rmse_db) and math.isfinite(fit.h0)
        assert fit_profile(prof) == fit

    def test_tie_break_prefers_small_beta_then_small_h0(self):
        betas = np.array([0.1, 0.2])
        h0s = np.array([-10.0, 5.0, 10.0])
        f = np.zeros((2, 3))
        assert _tie_broken_argmin(f, betas, h0s) == (0, 1)
        f[0, 1] = 1.0
        # |-10| == |10|: positive h0 wins
        assert _tie_broken_argmin(f, betas, h0s) == (0, 2)

    def test_too_few_bins(self):
        with pytest.raises(InsufficientData):
            fit_profile(AltitudeProfile("x", "1", (10.0, 15.0), (1.0, 2.0)))


class TestFitOptions:
    @pytest.mark.parametrize("kwargs", [dict(domain="log"), dict(beta_bounds=(0.0, 1.0)),
                                        dict(beta_bounds=(1.0, 0.5)), dict(h0_bounds=(5.0, 5.0)),
                                        dict(beta_grid=1)])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            FitOptions(**kwargs)

    def test_grids(self):
        o = FitOptions()
        assert o.beta_values()[0] == pytest.approx(1e-3) and o.beta_values()[-1] == pytest.approx(2.0)
        assert o.h0_values().size == 121 and o.h0_values()[60] == 0.0


def test_fit_result_round_trip(n5_2024):
    fit = fit_profile(n5_2024[1])
    assert FitResult.from_dict(fit.to_dict()) == fit
