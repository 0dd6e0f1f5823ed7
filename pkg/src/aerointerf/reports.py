"""Plain-text fit and transfer tables.

Formatting is fixed (beta to 2 decimals, h0 to 1, C~ in scientific notation
below 0.1) so identical inputs always give byte-identical reports.
"""

from __future__ import annotations

import math
from typing import Iterable

from .estimation import FitResult
from .transfer import TransferResult

FIT_COLUMNS = ("Year", "Band", "β", "H₀ [m]", "C̃", "RMSE [dB]", "R²_lin", "R²_dB", "Flags")
TRANSFER_COLUMNS = ("Band", "β", "C̃", "RMSE_dB", "R²_dB", "ΔRMSE_dB", "Score", "Flags")


def fmt_beta(beta: float) -> str:
    return f"{beta:.2f}"


def fmt_h0(h0: float) -> str:
    return f"{h0:.1f}"


def fmt_activity(c: float) -> str:
    return f"{c:.2e}" if abs(c) < 0.1 else f"{c:.2f}"


def fmt_r2(r2) -> str:
    return "undef" if r2 is None else f"{r2:.2f}"


def fmt_signed(x: float) -> str:
    return f"{x:+.2f}"


def fmt_score(score: float) -> str:
    return "inf" if math.isinf(score) else f"{score:.2f}"


def _table(columns, rows) -> str:
    widths = [max(len(c), *(len(r[i]) for r in rows)) if rows else len(c)
              for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip(),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def fit_row(fit: FitResult) -> tuple:
    flags = "degenerate" if fit.degenerate else ""
    return (fit.year, fit.band, fmt_beta(fit.beta), fmt_h0(fit.h0), fmt_activity(fit.c_tilde),
            f"{fit.rmse_db:.2f}", fmt_r2(fit.r2_lin), fmt_r2(fit.r2_db), flags)


def transfer_row(res: TransferResult) -> tuple:
    flags = []
    if res.at_bound:
        flags.append("beta-at-bound")
    elif not res.calibration_exact:
        flags.append("inexact-calibration")
    if res.score_undefined:
        flags.append("perfect-direct-fit")
    return (res.band, fmt_beta(res.beta_hat), fmt_activity(res.c_tilde_hat), f"{res.rmse_db:.2f}",
            fmt_r2(res.r2_db), fmt_signed(res.delta_rmse_db), fmt_score(res.transfer_score),
            ",".join(flags))


def fit_table(fits: Iterable[FitResult]) -> str:
    return _table(FIT_COLUMNS, [fit_row(f) for f in fits])


def transfer_table(results: Iterable[TransferResult]) -> str:
    return _table(TRANSFER_COLUMNS, [transfer_row(r) for r in results])
