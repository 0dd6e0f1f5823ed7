"""Orchestration behind the CLI subcommands, usable directly from Python."""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .errors import MissingReferenceFit, UnknownProfile, ValidationFailure
from .estimation import FitResult, fit_profile
from .field import RNG_ALGORITHM, monte_carlo_profile, synthesize_profile
from .model import ModelParams, frequency_normalized_activity, mean_interference
from .store import CampaignStore, write_profiles
from .transfer import (TransferResult, TransferSpec, evaluate_transfer, transferred_params,
                       two_point_calibrate)
from .validation import CheckResult, run_validation
from . import metrics


def sidecar_path(out) -> Path:
    return Path(out).with_suffix(".json")


def cmd_simulate(config: RunConfig, params: ModelParams, out, *, band="synthetic", year="0",
                 unit="linear", jitter_db=0.0, noise_floor=None, monte_carlo=False,
                 workers=1) -> tuple[Path, Path]:
    """Write a synthetic profile CSV and a JSON sidecar describing how it was made.

    The sidecar carries no timestamps or thread counts, so reruns with the same
    config and seed produce identical files.
    """
    env, spec = config.environment, config.simulation
    noise = spec.noise_floor if noise_floor is None else float(noise_floor)
    meta = {
        "band": band,
        "year": str(year),
        "unit": unit,
        "mode": "monte-carlo" if monte_carlo else "closed-form",
        "seed": int(spec.rng_seed),
        "params": {"beta": params.beta, "h0": params.h0, "c_eff": params.c_eff,
                   "c_tilde": frequency_normalized_activity(params.c_eff, env)},
        "jitter_db": float(jitter_db),
        "noise_floor": noise,
        "config": config.to_dict(),
        "generator": {"rng": RNG_ALGORITHM, "numpy": np.__version__, "aerointerf": __version__},
    }
    if monte_carlo:
        mc_spec = replace(spec, noise_floor=noise)
        prof, est = monte_carlo_profile(params, env, config.shadowing, mc_spec, config.grid,
                                        band=band, year=year, workers=workers)
        meta["std_errors"] = [e.std_error for e in est]
        meta["realizations"] = int(spec.realizations)
    else:
        prof = synthesize_profile(params, env, config.grid, noise_floor=noise, jitter_db=jitter_db,
                                  seed=spec.rng_seed, band=band, year=year)
    out = Path(out)
    write_profiles([prof], out, unit)
    side = sidecar_path(out)
    side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return out, side


def cmd_fit(config: RunConfig, store: CampaignStore, band, year) -> FitResult:
    prof = store.profile(band, year)
    fit = fit_profile(prof, config.pathloss, config.environment, config.fit)
    store.add_fit(fit)
    return fit


def _fit_for(config, store, band, year, error):
    try:
        return store.fit(band, year)
    except MissingReferenceFit:
        pass
    try:
        return cmd_fit(config, store, band, year)
    except UnknownProfile:
        raise error(f"no fit or profile for band {band!r}, year {year}") from None


def cmd_transfer(config: RunConfig, store: CampaignStore, band, reference_year, target_year
                 ) -> TransferResult:
    """Carry ``h0`` from the reference year to the target via two-point calibration.

    A reference fit is taken from ``store.fits`` if present, otherwise fitted
    from the stored reference profile.  The target's direct fit is the
    baseline for the score.
    """
    ref = _fit_for(config, store, band, reference_year, MissingReferenceFit)
    target = store.profile(band, target_year)
    direct = _fit_for(config, store, band, target_year, UnknownProfile)
    spec = TransferSpec(config.transfer.h1, config.transfer.h2, ref.h0, reference_beta=ref.beta)
    cal = two_point_calibrate(target, spec, config.pathloss, config.environment,
                              beta_bounds=config.fit.beta_bounds)
    params = transferred_params(cal, spec, config.pathloss)
    return evaluate_transfer(target, params, direct, config.environment, at_bound=cal.at_bound,
                             reference_year=str(reference_year), calibration_exact=cal.exact)


def cmd_metrics(config: RunConfig, store: CampaignStore, band, year, params: ModelParams) -> dict:
    prof = store.profile(band, year)
    pred = mean_interference(params, config.environment, prof.h)
    return {
        "band": band,
        "year": str(year),
        "rmse_db": metrics.rmse_db(prof.y, pred),
        "rmse_lin": metrics.rmse_linear(prof.y, pred),
        "r2_lin": metrics.r_squared_or_none(prof.y, pred, "linear"),
        "r2_db": metrics.r_squared_or_none(prof.y, pred, "db"),
    }


def cmd_validate(config: RunConfig, closed_form=mean_interference, workers=1,
                 report=None) -> list[CheckResult]:
    """Run the oracle suite, optionally streaming lines to ``report``; raise on failure."""
    checks = run_validation(config, closed_form, workers)
    if report is not None:
        for c in checks:
            report(c.line())
    failed = [c for c in checks if not c.passed]
    if failed:
        raise ValidationFailure(failed[0])
    return checks
