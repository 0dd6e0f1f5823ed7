"""Least-squares fit of (beta, h0, C_eff) to one altitude profile.

The activity constant enters the model linearly, so for each candidate
``(beta, h0)`` it is solved in closed form (``profiled_scale``).  That leaves a
2-D search: a coarse grid over log-spaced ``beta`` and linear ``h0``, then a
Nelder-Mead polish in ``(log beta, h0)`` started from the best grid point.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize

from . import metrics
from .errors import InsufficientData
from .model import (EnvironmentParams, LosTransition, ModelParams, PathLossPair,
                    campbell_unit_mean, frequency_normalized_activity, logistic,
                    mean_interference, shape_function)
from .profiles import AltitudeProfile

MIN_FIT_BINS = 3


@dataclass(frozen=True)
class FitOptions:
    domain: str = "db"
    beta_bounds: tuple = (1e-3, 2.0)
    h0_bounds: tuple = (-300.0, 300.0)
    beta_grid: int = 60
    h0_grid: int = 121
    xtol: float = 1e-6
    noise_floor: float = 0.0  # known constant floor removed before fitting

    def __post_init__(self):
        object.__setattr__(self, "beta_bounds", tuple(float(b) for b in self.beta_bounds))
        object.__setattr__(self, "h0_bounds", tuple(float(b) for b in self.h0_bounds))
        if self.domain not in metrics.DOMAINS:
            raise ValueError(f"domain must be one of {metrics.DOMAINS}")
        lo, hi = self.beta_bounds
        if not (0 < lo < hi):
            raise ValueError("beta bounds must satisfy 0 < lo < hi")
        if not (self.h0_bounds[0] < self.h0_bounds[1]):
            raise ValueError("h0 bounds must satisfy lo < hi")
        if self.beta_grid < 2 or self.h0_grid < 2:
            raise ValueError("grids need at least 2 points")

    def beta_values(self) -> np.ndarray:
        return np.geomspace(*self.beta_bounds, self.beta_grid)

    def h0_values(self) -> np.ndarray:
        return np.linspace(*self.h0_bounds, self.h0_grid)


@dataclass(frozen=True)
class FitResult:
    band: str
    year: str
    params: ModelParams
    c_tilde: float
    rmse_db: float
    rmse_lin: float
    r2_lin: float | None  # None: observed series has no variance
    r2_db: float | None
    fit_domain: str
    objective: float
    grid_objective: float
    degenerate: bool = False
    n_bins: int = 0

    @property
    def beta(self) -> float:
        return self.params.beta

    @property
    def h0(self) -> float:
        return self.params.h0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = {"beta": self.params.beta, "h0": self.params.h0, "c_eff": self.params.c_eff,
                       "alpha_los": self.params.pathloss.alpha_los,
                       "alpha_nlos": self.params.pathloss.alpha_nlos}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FitResult":
        d = dict(d)
        p = d.pop("params")
        params = ModelParams(LosTransition(p["beta"], p["h0"]), p["c_eff"],
                             PathLossPair(p["alpha_los"], p["alpha_nlos"]))
        return cls(params=params, **d)


def _prepared(profile: AltitudeProfile, noise_floor: float):
    y = profile.y - noise_floor
    if np.any(y <= 0):
        raise ValueError("noise floor subtraction left non-positive powers")
    return profile.h, y


def _scale_and_objective(y, d, domain):
    """Optimal scale and residual sum of squares for shapes ``d`` (last axis = bins)."""
    if domain == "db":
        r = 10.0 * np.log10(y) - 10.0 * np.log10(d)
        offset = r.mean(axis=-1, keepdims=True)
        dev = r - offset
        return 10.0 ** (offset[..., 0] / 10.0), (dev * dev).sum(axis=-1)
    # linear: normalize so objective values are O(1)
    s = y.max()
    yn, dn = y / s, d / s
    k = (yn * dn).sum(axis=-1) / (dn * dn).sum(axis=-1)
    res = yn - k[..., None] * dn
    return k, (res * res).sum(axis=-1)


def profiled_scale(profile: AltitudeProfile, transition: LosTransition, pathloss: PathLossPair,
                   env: EnvironmentParams, domain: str = "db", noise_floor: float = 0.0) -> float:
    """Exactly optimal ``C_eff`` for fixed ``(beta, h0)`` in the given fit domain.

    dB domain: ``C_eff = 10^(mean dB residual / 10)``.  Linear domain:
    ``C_eff = <Y D> / <D^2>``.
    """
    h, y = _prepared(profile, noise_floor)
    d = np.asarray(shape_function(transition, pathloss, env, h))
    k, _ = _scale_and_objective(y, d, domain)
    return float(k)


def _objective(y, h, beta, h0, pathloss, env, domain):
    d = np.asarray(shape_function(LosTransition(beta, h0), pathloss, env, h))
    return float(_scale_and_objective(y, d, domain)[1])


def _grid_search(y, h, pathloss, env, options):
    betas, h0s = options.beta_values(), options.h0_values()
    b = betas[:, None, None]
    p = logistic(b * (h[None, None, :] - h0s[None, :, None]))
    alpha = pathloss.alpha_nlos - (pathloss.alpha_nlos - pathloss.alpha_los) * p
    d = campbell_unit_mean(alpha, h, env)
    _, f = _scale_and_objective(y, d, options.domain)
    return betas, h0s, f


def _tie_broken_argmin(f, betas, h0s):
    """Best grid cell; near-equal objectives prefer smaller beta, then smaller |h0|."""
    fmin = f.min()
    tied = np.argwhere(f <= fmin + 1e-12 * (1.0 + abs(fmin)))
    # lexsort: last key is primary
    order = np.lexsort((-h0s[tied[:, 1]], np.abs(h0s[tied[:, 1]]), betas[tied[:, 0]]))
    i, j = tied[order[0]]
    return int(i), int(j)


def _refine(y, h, beta0, h00, pathloss, env, options):
    lb_lo, lb_hi = math.log(options.beta_bounds[0]), math.log(options.beta_bounds[1])
    h_lo, h_hi = options.h0_bounds
    dlb = (lb_hi - lb_lo) / (options.beta_grid - 1)
    dh = (h_hi - h_lo) / (options.h0_grid - 1)

    def fun(v):
        lb = min(max(v[0], lb_lo), lb_hi)
        hh = min(max(v[1], h_lo), h_hi)
        return _objective(y, h, math.exp(lb), hh, pathloss, env, options.domain)

    x0 = np.array([math.log(beta0), h00])
    # simplex one grid cell wide, stepping inward from bounds
    step_b = dlb if x0[0] + dlb <= lb_hi else -dlb
    step_h = dh if x0[1] + dh <= h_hi else -dh
    simplex = np.array([x0, x0 + [step_b, 0.0], x0 + [0.0, step_h]])
    res = optimize.minimize(fun, x0, method="Nelder-Mead",
                            bounds=[(lb_lo, lb_hi), (h_lo, h_hi)],
                            options={"initial_simplex": simplex, "xatol": options.xtol * 0.1,
                                     "fatol": 1e-15, "maxiter": 4000, "maxfev": 8000})
    return math.exp(min(max(res.x[0], lb_lo), lb_hi)), float(min(max(res.x[1], h_lo), h_hi)), \
        float(res.fun)


def _is_flat(y) -> bool:
    return float(y.max() - y.min()) <= 1e-12 * float(y.max())


def fit_profile(profile: AltitudeProfile, pathloss: PathLossPair = PathLossPair(),
                env: EnvironmentParams = EnvironmentParams(),
                options: FitOptions = FitOptions()) -> FitResult:
    """Least-squares estimate of ``(beta, h0, C_eff)`` for one profile.

    A profile whose bins are all equal carries no altitude structure: it is
    flagged ``degenerate``, ``beta`` is pinned to its lower bound, and only
    ``h0`` is scanned (tie-broken toward small ``|h0|``).  R^2 values that
    are undefined for such data come back as ``None``.

    Raises:
        InsufficientData: fewer than three bins.
    """
    if len(profile) < MIN_FIT_BINS:
        raise InsufficientData(f"need >= {MIN_FIT_BINS} bins, profile has {len(profile)}")
    h, y = _prepared(profile, options.noise_floor)
    degenerate = _is_flat(y)

    betas, h0s, f = _grid_search(y, h, pathloss, env, options)
    if degenerate:
        f = f[:1]
    i, j = _tie_broken_argmin(f, betas, h0s)
    grid_obj = float(f[i, j])
    beta, h0, obj = float(betas[i]), float(h0s[j]), grid_obj
    if not degenerate:
        rb, rh, robj = _refine(y, h, beta, h0, pathloss, env, options)
        if robj < grid_obj:
            beta, h0, obj = rb, rh, robj

    transition = LosTransition(beta, h0)
    c_eff = profiled_scale(profile, transition, pathloss, env, options.domain, options.noise_floor)
    params = ModelParams(transition, c_eff, pathloss)
    pred = np.asarray(mean_interference(params, env, h)) + options.noise_floor
    obs = profile.y
    return FitResult(
        band=profile.band,
        year=profile.year,
        params=params,
        c_tilde=frequency_normalized_activity(c_eff, env),
        rmse_db=metrics.rmse_db(obs, pred),
        rmse_lin=metrics.rmse_linear(obs, pred),
        r2_lin=metrics.r_squared_or_none(obs, pred, "linear"),
        r2_db=metrics.r_squared_or_none(obs, pred, "db"),
        fit_domain=options.domain,
        objective=obj,
        grid_objective=grid_obj,
        degenerate=degenerate,
        n_bins=len(profile),
    )
