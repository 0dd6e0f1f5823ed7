"""Goodness-of-fit metrics for altitude profiles.

The headline error metric, :func:`rmse_db`, is the RMS of dB-domain residuals
``10 log10(predicted) - 10 log10(observed)``.  A linear-domain RMSE is kept
under its own name (:func:`rmse_linear`) so the two readings never get mixed up.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EmptySeries, NonPositivePower, UndefinedVariance

DOMAINS = ("linear", "db")


def db_from_linear(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)) or np.any(~np.isfinite(x)):
        raise NonPositivePower("dB conversion needs finite powers > 0")
    out = 10.0 * np.log10(x)
    return float(out) if out.ndim == 0 else out


def linear_from_db(x):
    out = 10.0 ** (np.asarray(x, dtype=float) / 10.0)
    return float(out) if out.ndim == 0 else out


def _paired(observed, predicted):
    y = np.asarray(observed, dtype=float).ravel()
    yhat = np.asarray(predicted, dtype=float).ravel()
    if y.size == 0:
        raise EmptySeries("metric needs at least one bin")
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: {y.size} observed vs {yhat.size} predicted")
    if np.any(~(y > 0)) or np.any(~(yhat > 0)):
        raise NonPositivePower("observed and predicted powers must be > 0")
    return y, yhat


def db_residuals(observed, predicted) -> np.ndarray:
    """Per-bin ``10 log10(predicted) - 10 log10(observed)``."""
    y, yhat = _paired(observed, predicted)
    return db_from_linear(yhat) - db_from_linear(y)


def rmse_db(observed, predicted) -> float:
    r = db_residuals(observed, predicted)
    return math.sqrt(math.fsum(r * r) / r.size)


def rmse_linear(observed, predicted) -> float:
    y, yhat = _paired(observed, predicted)
    r = yhat - y
    return math.sqrt(math.fsum(r * r) / r.size)


def r_squared(observed, predicted, domain: str = "db") -> float:
    """Coefficient of determination ``1 - SS_res / SS_tot`` in ``domain``.

    SS_tot is taken about the observed mean, with no degrees-of-freedom
    adjustment.  Raises ``UndefinedVariance`` when the observed series is
    constant in that domain.
    """
    if domain not in DOMAINS:
        raise ValueError(f"domain must be one of {DOMAINS}, got {domain!r}")
    y, yhat = _paired(observed, predicted)
    if domain == "db":
        y, yhat = db_from_linear(y), db_from_linear(yhat)
    dev = y - y.mean()
    ss_tot = math.fsum(dev * dev)
    # constant up to rounding of the mean
    if ss_tot <= (8 * np.finfo(float).eps * float(np.abs(y).max())) ** 2 * y.size:
        raise UndefinedVariance(f"observed series has no variance in the {domain} domain")
    res = y - yhat
    return 1.0 - math.fsum(res * res) / ss_tot


def r_squared_or_none(observed, predicted, domain: str = "db"):
    """Like :func:`r_squared` but returns ``None`` where R^2 is undefined."""
    try:
        return r_squared(observed, predicted, domain)
    except UndefinedVariance:
        return None
