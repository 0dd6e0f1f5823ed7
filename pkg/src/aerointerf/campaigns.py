"""Published per-campaign summaries (aerial measurements, 2023-2025).

Only the summary rows are public, not the underlying measurements, so these
serve as plausibility fixtures and as generator parameters for synthetic
profiles.
"""

from __future__ import annotations

from typing import NamedTuple


class CampaignFit(NamedTuple):
    year: str
    band: str
    beta: float
    h0: float
    c_tilde: float
    rmse_db: float
    r2_lin: float
    r2_db: float


class CampaignTransfer(NamedTuple):
    band: str
    beta: float
    c_tilde: float
    rmse_db: float
    r2_db: float
    delta_rmse_db: float
    score: float


CAMPAIGN_FITS = (
    CampaignFit("2023", "LTE B13 DL", 0.29, 22.1, 1.90, 2.74, 0.30, 0.81),
    CampaignFit("2023", "LTE B13 UL", 0.01, -199.6, 6.21e-4, 0.56, 0.91, 0.03),
    CampaignFit("2023", "5G n5 DL", 0.08, 14.0, 1.23, 2.77, 0.87, 0.85),
    CampaignFit("2023", "5G n5 UL", 0.06, -31.0, 2.46e-3, 0.68, 0.35, 0.41),
    CampaignFit("2023", "CBRS", 0.03, -49.0, 1.33e-3, 0.35, 1.00, 0.90),
    CampaignFit("2024", "LTE B13 DL", 0.35, 27.0, 1.00, 2.97, 0.81, 0.78),
    CampaignFit("2024", "LTE B13 UL", 0.02, -120.8, 2.61e-3, 0.25, 0.68, 0.22),
    CampaignFit("2024", "5G n5 DL", 0.08, 14.3, 1.11, 2.26, 0.94, 0.88),
    CampaignFit("2024", "5G n5 UL", 0.05, -35.5, 5.47e-3, 0.40, 0.64, 0.71),
    CampaignFit("2024", "CBRS", 0.05, -14.3, 1.38e-3, 0.46, 1.00, 0.94),
    CampaignFit("2025", "LTE B13 DL", 0.16, 19.3, 1.25, 1.98, 0.67, 0.89),
    CampaignFit("2025", "LTE B13 UL", 0.03, -101.5, 2.35e-3, 0.31, 0.60, 0.20),
    CampaignFit("2025", "5G n5 DL", 0.08, 23.7, 2.48, 1.95, 0.94, 0.94),
    CampaignFit("2025", "5G n5 UL", 0.05, -32.5, 1.20e-2, 0.71, 0.40, 0.48),
    CampaignFit("2025", "CBRS", 0.05, -24.3, 1.81e-3, 0.44, 1.00, 0.90),
)

# 2024 -> 2025, h0 from 2024, calibration bins at 40 m and 100 m
CAMPAIGN_TRANSFERS = (
    CampaignTransfer("LTE B13 DL", 0.19, 1.28, 2.77, 0.79, 0.79, 1.40),
    CampaignTransfer("LTE B13 UL", 0.03, 2.17e-3, 0.43, -0.57, 0.12, 1.40),
    CampaignTransfer("5G n5 DL", 0.04, 2.69, 3.89, 0.76, 1.93, 1.99),
    CampaignTransfer("5G n5 UL", 0.05, 1.19e-2, 0.75, 0.42, 0.04, 1.05),
    CampaignTransfer("CBRS", 0.06, 1.72e-3, 0.59, 0.81, 0.15, 1.34),
)


def campaign_fit(year, band) -> CampaignFit:
    for row in CAMPAIGN_FITS:
        if row.year == str(year) and row.band == band:
            return row
    raise KeyError((str(year), band))


def is_uplink(band: str) -> bool:
    return band.endswith(" UL")
