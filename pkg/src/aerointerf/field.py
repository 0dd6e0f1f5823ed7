"""Monte Carlo Poisson-field simulator and synthetic profile generation.

Per-realization random streams come from a counter-based Philox4x64-10
generator keyed by ``(seed, stream)`` with the realization index in the top
counter word.  Realizations therefore never share randomness, may run in any
order on any number of threads, and always give bit-identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import (EnvironmentParams, ModelParams, mean_interference, path_loss_exponent,
                    truncation_tail)
from .profiles import AltitudeGrid, AltitudeProfile

RNG_ALGORITHM = "philox4x64-10"

# stream tags keep independent uses of one seed apart
STREAM_FIELD = 0
STREAM_JITTER = 1

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class ShadowingSpec:
    """Unit-mean lognormal shadowing with dB standard deviation ``sigma_db``."""

    sigma_db: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma_db) and self.sigma_db >= 0):
            raise ValueError("sigma_db must be finite and >= 0")

    @property
    def sigma_ln(self) -> float:
        return self.sigma_db * math.log(10.0) / 10.0

    @property
    def mu_ln(self) -> float:
        # E[S] = exp(mu + sigma^2 / 2) = 1
        return -0.5 * self.sigma_ln ** 2


@dataclass(frozen=True)
class SimulationSpec:
    realizations: int = 100_000
    rng_seed: int = 0
    r_max: float = 500.0
    noise_floor: float = 0.0

    def __post_init__(self):
        if int(self.realizations) != self.realizations or self.realizations < 1:
            raise ValueError("realizations must be an integer >= 1")
        if not (0 <= int(self.rng_seed) <= _U64):
            raise ValueError("rng_seed must fit in an unsigned 64-bit integer")
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise ValueError("r_max must be finite and > 0")
        if not (math.isfinite(self.noise_floor) and self.noise_floor >= 0):
            raise ValueError("noise_floor must be finite and >= 0")


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_error: float
    realizations: int
    rng: str = RNG_ALGORITHM


def realization_rng(seed: int, index: int, stream: int = STREAM_FIELD) -> np.random.Generator:
    bitgen = np.random.Philox(key=np.array([int(seed) & _U64, stream], dtype=np.uint64),
                              counter=np.array([0, 0, 0, index], dtype=np.uint64))
    return np.random.Generator(bitgen)


def default_r_max(params: ModelParams, env: EnvironmentParams, h: float,
                  tail_fraction: float = 1e-4) -> float:
    """Smallest disc radius whose analytic tail is below ``tail_fraction`` of mu(h).

    The tail fraction is ``((R^2 + h^2) / (r0^2 + h^2))^(1 - alpha/2)``, so this
    inverts that in closed form.  Heavy tails (alpha near 2, i.e. high altitude
    under LoS) make the radius enormous; see :func:`truncation_tail` for the
    cheaper route of a moderate radius plus analytic correction.
    """
    alpha = path_loss_exponent(params, h)
    base = env.r0 ** 2 + h ** 2
    r2 = base * tail_fraction ** (1.0 / (1.0 - alpha / 2.0)) - h ** 2
    return math.sqrt(r2) * (1.0 + 1e-12)


def _annulus(env: EnvironmentParams, spec: SimulationSpec):
    if spec.r_max <= env.r0:
        raise ValueError(f"r_max ({spec.r_max}) must exceed the guard radius ({env.r0})")
    span = spec.r_max ** 2 - env.r0 ** 2
    return env.lambda_ * math.pi * span, span


def _draw_r2(g: np.random.Generator, env, mean_count, span):
    n = g.poisson(mean_count)
    # density proportional to r on [r0, r_max]
    return env.r0 ** 2 + g.random(n) * span


def sample_field(env: EnvironmentParams, spec: SimulationSpec, realization: int = 0) -> np.ndarray:
    """Horizontal distances of one PPP realization inside the annulus [r0, r_max]."""
    mean_count, span = _annulus(env, spec)
    g = realization_rng(spec.rng_seed, realization)
    return np.sqrt(_draw_r2(g, env, mean_count, span))


def _realization_sums(params, env, shadow, spec, hs, workers) -> np.ndarray:
    """Per-realization sums, shape ``(realizations, len(hs))``; one field serves every altitude."""
    mean_count, span = _annulus(env, spec)
    hs = [float(h) for h in hs]
    if any(h < 0 for h in hs):
        raise ValueError("altitude must be >= 0")
    exps = [-0.5 * float(path_loss_exponent(params, h)) for h in hs]
    sigma, mu = shadow.sigma_ln, shadow.mu_ln
    n = int(spec.realizations)
    sums = np.zeros((n, len(hs)))

    def run(lo, hi):
        for i in range(lo, hi):
            g = realization_rng(spec.rng_seed, i)
            r2 = _draw_r2(g, env, mean_count, span)
            if r2.size == 0:
                continue
            s = g.lognormal(mu, sigma, r2.size) if sigma > 0 else None
            for j, (h, e) in enumerate(zip(hs, exps)):
                p = (r2 + h * h) ** e
                if s is not None:
                    p *= s
                sums[i, j] = p.sum()

    workers = max(1, int(workers))
    if workers == 1:
        run(0, n)
    else:
        bounds = np.linspace(0, n, min(n, 8 * workers) + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, bounds[:-1], bounds[1:]))
    return sums * params.c_eff


def _estimate(sums: np.ndarray, noise_floor: float) -> MonteCarloEstimate:
    n = sums.size
    mean = math.fsum(sums) / n
    if n > 1:
        dev = sums - mean
        std_error = math.sqrt(math.fsum(dev * dev) / (n - 1) / n)
    else:
        std_error = 0.0
    return MonteCarloEstimate(mean + noise_floor, std_error, n)


def aggregate_interference(params: ModelParams, env: EnvironmentParams, shadow: ShadowingSpec,
                           spec: SimulationSpec, h: float, workers: int = 1) -> MonteCarloEstimate:
    """Sample-mean aggregate power at altitude ``h`` over ``spec.realizations`` fields.

    Each realization draws a fresh PPP in the annulus and (if enabled) a fresh
    shadowing factor per point.  The estimate targets
    ``mean_interference - truncation_tail(r_max) + noise_floor``.
    """
    sums = _realization_sums(params, env, shadow, spec, [h], workers)
    return _estimate(sums[:, 0], spec.noise_floor)


def campbell_target(params: ModelParams, env: EnvironmentParams, spec: SimulationSpec, h) -> float:
    """What the Monte Carlo mean converges to: closed form minus truncated tail, plus noise."""
    return (mean_interference(params, env, h) - truncation_tail(params, env, h, spec.r_max)
            + spec.noise_floor)


def _grid_values(grid) -> np.ndarray:
    h = grid.altitudes() if isinstance(grid, AltitudeGrid) else np.asarray(grid, dtype=float)
    if h.size == 0:
        raise ValueError("altitude grid is empty")
    if np.any(np.diff(h) <= 0):
        raise ValueError("altitude grid must be strictly increasing")
    return h


def synthesize_profile(params: ModelParams, env: EnvironmentParams,
                       grid: AltitudeGrid | Sequence[float], noise_floor: float = 0.0,
                       jitter_db: float = 0.0, seed: int = 0,
                       band: str = "synthetic", year: str = "0") -> AltitudeProfile:
    """Closed-form profile plus optional constant noise and i.i.d. dB jitter."""
    h = _grid_values(grid)
    y = mean_interference(params, env, h) + noise_floor
    if jitter_db > 0:
        g = realization_rng(seed, 0, stream=STREAM_JITTER)
        y = y * 10.0 ** (g.normal(0.0, jitter_db, h.size) / 10.0)
    return AltitudeProfile(band, str(year), tuple(h), tuple(np.atleast_1d(y)))


def monte_carlo_profile(params: ModelParams, env: EnvironmentParams, shadow: ShadowingSpec,
                        spec: SimulationSpec, grid, band: str = "synthetic", year: str = "0",
                        workers: int = 1) -> tuple[AltitudeProfile, list[MonteCarloEstimate]]:
    """Profile of Monte Carlo means; every bin sees the same fields (common random numbers).

    Each bin equals ``aggregate_interference`` at that altitude bit for bit.
    """
    h = _grid_values(grid)
    sums = _realization_sums(params, env, shadow, spec, h, workers)
    estimates = [_estimate(sums[:, j], spec.noise_floor) for j in range(h.size)]
    prof = AltitudeProfile(band, str(year), tuple(h), tuple(e.mean for e in estimates))
    return prof, estimates
