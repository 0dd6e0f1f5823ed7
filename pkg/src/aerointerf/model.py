"""Mean-only altitude-dependent aggregate interference model.

A UAV receiver at altitude ``h`` sees a homogeneous Poisson field of ground
transmitters (density ``lambda_``) outside a guard radius ``r0``.  Each link has
path-loss exponent ``alpha(h)``, interpolated between LoS and NLoS values by a
logistic LoS probability.  The mean aggregate power follows from Campbell's
theorem::

    mu(h) = 2*pi*lambda*C_eff * (h^2 + r0^2)^(1 - alpha(h)/2) / (alpha(h) - 2)

All powers here are linear.  ``lambda_`` and ``c_eff`` only ever appear as a
product, so from mean data alone only ``lambda_ * c_eff`` is identifiable; the
density is treated as fixed configuration and ``c_eff`` absorbs the scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DivergentIntegral, QuadratureNonConvergence

SPEED_OF_LIGHT = 299_792_458.0  # m/s

DEFAULT_ALPHA_LOS = 2.2
DEFAULT_ALPHA_NLOS = 3.6
DEFAULT_DENSITY = 1e-3  # transmitters per m^2
DEFAULT_GUARD_RADIUS = 20.0  # m
DEFAULT_CENTER_FREQUENCY = 1e9  # Hz; no band-specific default is assumed


@dataclass(frozen=True)
class LosTransition:
    """Logistic LoS transition: slope ``beta`` [1/m] and midpoint ``h0`` [m].

    ``beta == 0`` is the flat limit (LoS probability 0.5 everywhere).  ``h0``
    may be negative, which simply means the transition lies below ground.
    """

    beta: float
    h0: float

    def __post_init__(self):
        if not math.isfinite(self.beta) or self.beta < 0:
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if not math.isfinite(self.h0):
            raise ValueError(f"h0 must be finite, got {self.h0}")


@dataclass(frozen=True)
class PathLossPair:
    alpha_los: float = DEFAULT_ALPHA_LOS
    alpha_nlos: float = DEFAULT_ALPHA_NLOS

    def __post_init__(self):
        # alpha > 2 keeps the planar Campbell integral finite
        if not (2.0 < self.alpha_los <= self.alpha_nlos) or not math.isfinite(self.alpha_nlos):
            raise ValueError(
                f"need 2 < alpha_los <= alpha_nlos, got ({self.alpha_los}, {self.alpha_nlos})"
            )


@dataclass(frozen=True)
class EnvironmentParams:
    """Fixed scenario context.

    Attributes:
        lambda_: transmitter density [1/m^2]
        r0: guard radius [m]
        g_t, g_r: transmit/receive antenna gains (linear)
        f_c: center frequency [Hz]
    """

    lambda_: float = DEFAULT_DENSITY
    r0: float = DEFAULT_GUARD_RADIUS
    g_t: float = 1.0
    g_r: float = 1.0
    f_c: float = DEFAULT_CENTER_FREQUENCY

    def __post_init__(self):
        for name in ("lambda_", "r0", "g_t", "g_r", "f_c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value}")


@dataclass(frozen=True)
class ModelParams:
    transition: LosTransition
    c_eff: float
    pathloss: PathLossPair = field(default_factory=PathLossPair)

    def __post_init__(self):
        if not (math.isfinite(self.c_eff) and self.c_eff > 0):
            raise ValueError(f"c_eff must be finite and > 0, got {self.c_eff}")

    @property
    def beta(self) -> float:
        return self.transition.beta

    @property
    def h0(self) -> float:
        return self.transition.h0

    def with_scale(self, c_eff: float) -> "ModelParams":
        return ModelParams(self.transition, c_eff, self.pathloss)


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def logistic(x):
    """``1 / (1 + exp(-x))`` using only ``exp(-|x|)``, so it saturates instead of overflowing."""
    x = np.asarray(x, dtype=float)
    z = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


def los_probability(transition: LosTransition, h):
    x = transition.beta * (np.asarray(h, dtype=float) - transition.h0)
    return _scalar_or_array(logistic(x))


def _exponent(transition: LosTransition, pathloss: PathLossPair, h):
    p = np.asarray(los_probability(transition, h))
    a = pathloss.alpha_nlos - (pathloss.alpha_nlos - pathloss.alpha_los) * p
    # guard against rounding just outside the endpoints
    return np.clip(a, pathloss.alpha_los, pathloss.alpha_nlos)


def path_loss_exponent(params: ModelParams, h):
    """Effective exponent ``alpha(h)``, always inside ``[alpha_los, alpha_nlos]``."""
    return _scalar_or_array(_exponent(params.transition, params.pathloss, h))


def campbell_unit_mean(alpha, h, env: EnvironmentParams):
    """Closed-form Campbell mean for unit activity and exponent(s) ``alpha``."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 2.0):
        raise DivergentIntegral(f"path-loss exponent must exceed 2, got min {alpha.min()}")
    h = np.asarray(h, dtype=float)
    return 2.0 * np.pi * env.lambda_ * (h * h + env.r0 * env.r0) ** (1.0 - alpha / 2.0) / (alpha - 2.0)


def shape_function(transition: LosTransition, pathloss: PathLossPair, env: EnvironmentParams, h):
    """Mean interference with unit activity constant, ``D(h; beta, h0)``."""
    alpha = _exponent(transition, pathloss, h)
    return _scalar_or_array(campbell_unit_mean(alpha, h, env))


def mean_interference(params: ModelParams, env: EnvironmentParams, h):
    """Closed-form mean aggregate power at altitude(s) ``h`` (linear units).

    Accepts a scalar or an array of altitudes.  Raises ``DivergentIntegral``
    if the exponent is not above 2, which the ``PathLossPair`` invariant
    normally rules out.
    """
    d = shape_function(params.transition, params.pathloss, env, h)
    return _scalar_or_array(params.c_eff * np.asarray(d))


def truncation_tail(params: ModelParams, env: EnvironmentParams, h, r_max: float):
    """Mean power contributed by transmitters beyond horizontal radius ``r_max``."""
    alpha = _exponent(params.transition, params.pathloss, h)
    if np.any(alpha <= 2.0):
        raise DivergentIntegral("path-loss exponent must exceed 2")
    h = np.asarray(h, dtype=float)
    tail = (2.0 * np.pi * env.lambda_ * params.c_eff
            * (r_max * r_max + h * h) ** (1.0 - alpha / 2.0) / (alpha - 2.0))
    return _scalar_or_array(tail)


def mean_interference_quadrature(params: ModelParams, env: EnvironmentParams, h: float,
                                 rel_tol: float = 1e-10, max_segments: int = 5000) -> float:
    """Mean aggregate power by direct numerical integration of the Campbell integral.

    Serves as an independent check on :func:`mean_interference`.  The radial
    integral is taken in ``t = ln r`` on successive finite segments (adaptive
    Gauss-Kronrod on each); once the remaining tail, bounded analytically, is
    below ``rel_tol / 10`` of the running total it is added and integration
    stops.

    Raises:
        QuadratureNonConvergence: a segment misses its tolerance, or the tail
            is still too large after ``max_segments`` segments (exponent very
            close to 2).
    """
    if not (0.0 < rel_tol <= 1e-3):
        raise ValueError(f"rel_tol must be in (0, 1e-3], got {rel_tol}")
    if h < 0:
        raise ValueError("altitude must be >= 0")
    alpha = float(_exponent(params.transition, params.pathloss, h))
    if alpha <= 2.0:
        raise DivergentIntegral(f"path-loss exponent must exceed 2, got {alpha}")

    log_h2 = 2.0 * math.log(h) if h > 0 else -math.inf
    half_alpha = alpha / 2.0

    def integrand(t):
        # r^2 * (r^2 + h^2)^(-alpha/2) with r = e^t, kept in log space
        two_t = 2.0 * t
        return math.exp(two_t - half_alpha * np.logaddexp(two_t, log_h2))

    def tail_beyond(t):
        log_s = float(np.logaddexp(2.0 * t, log_h2))
        return math.exp((1.0 - half_alpha) * log_s) / (alpha - 2.0)

    # integrand decays like exp(-(alpha - 2) t) beyond t ~ ln h
    width = max(1.0, 2.0 / (alpha - 2.0))
    t = math.log(env.r0)
    seg_tol = rel_tol / 100.0
    pieces = []
    for _ in range(max_segments):
        value, abserr, *rest = integrate.quad(integrand, t, t + width, epsabs=0.0,
                                              epsrel=seg_tol, limit=200, full_output=1)
        if len(rest) > 1 or abserr > seg_tol * abs(value) + 1e-300:
            raise QuadratureNonConvergence(
                f"segment [{t:.3g}, {t + width:.3g}] missed tolerance (err {abserr:.3g})")
        pieces.append(value)
        t += width
        tail = tail_beyond(t)
        running = math.fsum(pieces)
        if tail < 0.1 * rel_tol * running:
            pieces.append(tail)
            return 2.0 * math.pi * env.lambda_ * params.c_eff * math.fsum(pieces)
    raise QuadratureNonConvergence(
        f"tail still above tolerance after {max_segments} segments (alpha={alpha:.6g})")


def frequency_normalized_activity(c_eff, env: EnvironmentParams):
    """Activity index ``C_eff * (4 pi f_c / c)^2 / (G_t G_r)``, comparable across bands."""
    factor = (4.0 * math.pi * env.f_c / SPEED_OF_LIGHT) ** 2 / (env.g_t * env.g_r)
    return c_eff * factor


def activity_from_normalized(c_tilde, env: EnvironmentParams):
    """Inverse of :func:`frequency_normalized_activity`."""
    factor = (4.0 * math.pi * env.f_c / SPEED_OF_LIGHT) ** 2 / (env.g_t * env.g_r)
    return c_tilde / factor
