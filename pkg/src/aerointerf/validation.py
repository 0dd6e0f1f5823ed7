"""End-to-end oracle checks for the closed-form mean.

Two independent references are used: direct quadrature of the Campbell
integral, and Monte Carlo sums over sampled Poisson fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .campaigns import CAMPAIGN_FITS, campaign_fit
from .config import RunConfig
from .field import ShadowingSpec, aggregate_interference
from .model import (LosTransition, ModelParams, activity_from_normalized, mean_interference,
                    mean_interference_quadrature, truncation_tail)

QUADRATURE_TOL = 1e-9
MC_ALTITUDES = (10.0, 60.0, 160.0)
MC_REL_FLOOR = 0.02
SHADOWING_ALTITUDE = 60.0
SHADOWING_SIGMA_DB = 6.0
MC_GENERATOR = ("2024", "5G n5 DL")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.value:.3e} <= {self.tolerance:.3e} {self.detail}".rstrip()


def generator_params(config: RunConfig, year=MC_GENERATOR[0], band=MC_GENERATOR[1]) -> ModelParams:
    row = campaign_fit(year, band)
    return ModelParams(LosTransition(row.beta, row.h0),
                       activity_from_normalized(row.c_tilde, config.environment), config.pathloss)


def check_quadrature(config: RunConfig, closed_form=mean_interference) -> CheckResult:
    env = config.environment
    worst, where = 0.0, ""
    for row in CAMPAIGN_FITS:
        params = ModelParams(LosTransition(row.beta, row.h0), 1.0, config.pathloss)
        for h in config.grid.altitudes():
            q = mean_interference_quadrature(params, env, float(h), rel_tol=QUADRATURE_TOL / 10)
            err = abs(float(closed_form(params, env, float(h))) / q - 1.0)
            if err > worst:
                worst, where = err, f"(worst at {row.year} {row.band}, h={h:g} m)"
    return CheckResult("closed-form-vs-quadrature", worst <= QUADRATURE_TOL, worst,
                       QUADRATURE_TOL, where)


def check_monte_carlo(config: RunConfig, closed_form=mean_interference, workers: int = 1,
                      params: ModelParams | None = None):
    """Campbell check at each MC altitude; returns (checks, estimates)."""
    env, spec = config.environment, config.simulation
    params = generator_params(config) if params is None else params
    checks, estimates = [], {}
    for h in MC_ALTITUDES:
        est = aggregate_interference(params, env, ShadowingSpec(0.0), spec, h, workers)
        target = (float(closed_form(params, env, h)) - truncation_tail(params, env, h, spec.r_max)
                  + spec.noise_floor)
        rel = abs(est.mean / target - 1.0)
        tol = max(MC_REL_FLOOR, 3.0 * est.std_error / est.mean)
        checks.append(CheckResult(f"campbell-monte-carlo h={h:g}m", rel <= tol, rel, tol,
                                  f"(n={est.realizations}, r_max={spec.r_max:g} m)"))
        estimates[h] = est
    return checks, estimates


def check_shadowing(config: RunConfig, baseline=None, workers: int = 1,
                    params: ModelParams | None = None) -> CheckResult:
    env, spec = config.environment, config.simulation
    params = generator_params(config) if params is None else params
    sigma = config.shadowing.sigma_db or SHADOWING_SIGMA_DB
    if baseline is None:
        baseline = aggregate_interference(params, env, ShadowingSpec(0.0), spec,
                                          SHADOWING_ALTITUDE, workers)
    shadowed = aggregate_interference(params, env, ShadowingSpec(sigma), spec,
                                      SHADOWING_ALTITUDE, workers)
    diff = abs(shadowed.mean - baseline.mean)
    tol = 3.0 * math.hypot(shadowed.std_error, baseline.std_error)
    return CheckResult(f"shadowing-mean-invariance sigma={sigma:g}dB", diff <= tol,
                       diff / baseline.mean, tol / baseline.mean, "(relative to sigma=0 mean)")


def run_validation(config: RunConfig = RunConfig(), closed_form=mean_interference,
                   workers: int = 1) -> list[CheckResult]:
    checks = [check_quadrature(config, closed_form)]
    mc, estimates = check_monte_carlo(config, closed_form, workers)
    checks += mc
    checks.append(check_shadowing(config, estimates.get(SHADOWING_ALTITUDE), workers))
    return checks

