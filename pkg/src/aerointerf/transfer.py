"""Two-point inter-year transfer calibration.

The transition altitude ``h0`` is frozen from a reference-year fit.  In the
target year only two bins ``(H1, Y1)`` and ``(H2, Y2)`` are used: the log-ratio
``ln(Y1/Y2)`` cancels ``C_eff`` and pins ``beta`` through the shape function,
then ``C_eff = Y1 / D(H1)``.

The log-ratio condition usually has two exact solutions in ``beta``: a
nearly-flat transition and a steeper one both reproduce the two bins.  The
solver keeps every zero it finds and picks the one closest (in log beta) to
the reference-year slope if one is supplied, else the steepest.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import optimize

from . import metrics
from .errors import MissingBin
from .estimation import FitResult
from .model import (EnvironmentParams, LosTransition, ModelParams, PathLossPair,
                    frequency_normalized_activity, mean_interference, shape_function)
from .profiles import AltitudeProfile

BETA_BOUNDS = (1e-3, 2.0)
SCAN_POINTS = 200
BRACKET_TOL = 1e-8  # golden-section width in log(beta)
ZERO_TOL = 1e-12  # squared log-ratio mismatch treated as an exact fit

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class TransferSpec:
    h1: float = 40.0
    h2: float = 100.0
    reference_h0: float = 0.0
    reference_beta: float | None = None

    def __post_init__(self):
        if self.h1 == self.h2:
            raise ValueError("calibration altitudes must differ")
        if not math.isfinite(self.reference_h0):
            raise ValueError("reference_h0 must be finite")


@dataclass(frozen=True)
class Calibration:
    beta_hat: float
    c_eff_hat: float
    objective: float
    at_bound: bool  # no exact zero, minimum on a search bound
    candidates: tuple = ()  # beta at every local minimum found, ascending

    def __iter__(self):
        return iter((self.beta_hat, self.c_eff_hat))

    @property
    def exact(self) -> bool:
        """Whether the two observed bins are reproduced exactly."""
        return self.objective <= ZERO_TOL


@dataclass(frozen=True)
class TransferResult:
    band: str
    beta_hat: float
    h0: float
    c_eff_hat: float
    c_tilde_hat: float
    rmse_db: float
    r2_db: float | None
    delta_rmse_db: float
    transfer_score: float
    direct_rmse_db: float
    score_undefined: bool = False  # direct fit was perfect; score is +inf
    at_bound: bool = False
    reference_year: str = ""
    target_year: str = ""
    calibration_exact: bool = True  # False: no beta reproduces the observed bin ratio

    def __post_init__(self):
        if self.direct_rmse_db > 0:
            expected = self.rmse_db / self.direct_rmse_db
            if not math.isclose(self.transfer_score, expected, rel_tol=1e-12):
                raise ValueError("transfer_score must equal rmse_db / direct_rmse_db")
        elif not (self.score_undefined and math.isinf(self.transfer_score)):
            raise ValueError("perfect direct fit requires the +inf score sentinel")

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(self.transfer_score):
            d["transfer_score"] = None
        return d


def _golden(f, a, b, tol):
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _bin_power(profile: AltitudeProfile, h: float) -> float:
    y = profile.power_at(h)
    if y is None:
        raise MissingBin(f"no bin at {h} m in profile {profile.band}/{profile.year}")
    return y


def two_point_calibrate(profile: AltitudeProfile, spec: TransferSpec,
                        pathloss: PathLossPair = PathLossPair(),
                        env: EnvironmentParams = EnvironmentParams(),
                        beta_bounds: tuple = BETA_BOUNDS) -> Calibration:
    """Estimate ``(beta, C_eff)`` from two bins with ``h0`` held at ``spec.reference_h0``.

    Minimizes ``(ln(Y1/Y2) - ln(D(H1)/D(H2)))^2`` over ``beta`` in log space:
    a log-grid scan locates each local minimum, golden-section narrows it,
    and where the mismatch changes sign a root polish brings it to machine
    precision.  If no exact zero exists and the best point is a bound, the
    result carries ``at_bound=True`` instead of raising.

    Raises:
        MissingBin: ``h1`` or ``h2`` is not a bin of ``profile``.
    """
    y1, y2 = _bin_power(profile, spec.h1), _bin_power(profile, spec.h2)
    h0 = spec.reference_h0
    target = math.log(y1 / y2)
    lo, hi = math.log(beta_bounds[0]), math.log(beta_bounds[1])

    def mismatch(lb):
        b = math.exp(lb)
        t = LosTransition(b, h0)
        d1 = shape_function(t, pathloss, env, spec.h1)
        d2 = shape_function(t, pathloss, env, spec.h2)
        return target - math.log(d1 / d2)

    def sq(lb):
        return mismatch(lb) ** 2

    grid = np.linspace(lo, hi, SCAN_POINTS)
    fvals = np.array([sq(v) for v in grid])
    left = np.r_[np.inf, fvals[:-1]]
    right = np.r_[fvals[1:], np.inf]
    # plateau interiors (equal on both sides) are skipped; a plateau reaching a bound keeps the bound
    minima = np.flatnonzero((fvals <= left) & (fvals <= right) & ((fvals < left) | (fvals < right)))

    found = []
    for i in minima:
        a, b = grid[max(i - 1, 0)], grid[min(i + 1, SCAN_POINTS - 1)]
        lb, fv = _golden(sq, a, b, BRACKET_TOL)
        # step outward from the golden-section point to find a sign change
        ga, gb = mismatch(max(lb - BRACKET_TOL, a)), mismatch(min(lb + BRACKET_TOL, b))
        if ga == 0.0 or gb == 0.0 or (ga < 0) != (gb < 0):
            if ga * gb < 0:
                lb = optimize.brentq(mismatch, max(lb - BRACKET_TOL, a), min(lb + BRACKET_TOL, b),
                                     xtol=1e-15, rtol=4 * np.finfo(float).eps)
            fv = sq(lb)
        elif fvals[i] < fv:
            lb, fv = grid[i], fvals[i]
        found.append((lb, fv))

    # one solution per basin, ascending beta
    found.sort()
    fmin = min(fv for _, fv in found)
    tied = [(lb, fv) for lb, fv in found if fv <= fmin + ZERO_TOL]
    if spec.reference_beta is not None and spec.reference_beta > 0:
        ref = math.log(spec.reference_beta)
        lb, fv = min(tied, key=lambda c: (abs(c[0] - ref), c[0]))
    else:
        lb, fv = tied[-1]

    beta_hat = math.exp(lb)
    at_bound = fv > ZERO_TOL and (abs(lb - lo) <= 2 * BRACKET_TOL or abs(lb - hi) <= 2 * BRACKET_TOL)
    beta_hat = min(max(beta_hat, beta_bounds[0]), beta_bounds[1])
    c_eff_hat = y1 / shape_function(LosTransition(beta_hat, h0), pathloss, env, spec.h1)
    return Calibration(beta_hat, float(c_eff_hat), float(fv), bool(at_bound),
                       tuple(math.exp(v) for v, _ in found))


def transferred_params(calibration: Calibration, spec: TransferSpec,
                       pathloss: PathLossPair = PathLossPair()) -> ModelParams:
    return ModelParams(LosTransition(calibration.beta_hat, spec.reference_h0),
                       calibration.c_eff_hat, pathloss)


def evaluate_transfer(profile: AltitudeProfile, transferred: ModelParams, direct: FitResult,
                      env: EnvironmentParams = EnvironmentParams(), at_bound: bool = False,
                      reference_year: str = "", calibration_exact: bool = True) -> TransferResult:
    """Score a transferred model on every bin of the target profile.

    The score is ``rmse_db / direct.rmse_db``; when the direct fit is perfect
    the score is ``+inf`` with ``score_undefined`` set.
    """
    pred = mean_interference(transferred, env, profile.h)
    rmse = metrics.rmse_db(profile.y, pred)
    if direct.rmse_db > 0:
        score, undefined = rmse / direct.rmse_db, False
    else:
        score, undefined = math.inf, True
    return TransferResult(
        band=profile.band,
        beta_hat=transferred.beta,
        h0=transferred.h0,
        c_eff_hat=transferred.c_eff,
        c_tilde_hat=frequency_normalized_activity(transferred.c_eff, env),
        rmse_db=rmse,
        r2_db=metrics.r_squared_or_none(profile.y, pred, "db"),
        delta_rmse_db=rmse - direct.rmse_db,
        transfer_score=score,
        direct_rmse_db=direct.rmse_db,
        score_undefined=undefined,
        at_bound=at_bound,
        reference_year=str(reference_year),
        target_year=profile.year,
        calibration_exact=calibration_exact,
    )
