"""Profile CSV ingestion/export and the in-memory campaign store.

CSV layout, one row per bin::

    band,year,altitude_m,mean_power

``mean_power`` is in whatever unit the caller declares (``dbm`` or
``linear``); profiles are always held in linear units.  Values are written with
``repr`` so a linear export re-ingests bit-exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from .errors import (DuplicateBin, MissingReferenceFit, OffGridAltitude, ParseError,
                     UnitMismatch, UnknownProfile)
from .estimation import FitResult
from .metrics import db_from_linear, linear_from_db
from .profiles import AltitudeGrid, AltitudeProfile

HEADER = ["band", "year", "altitude_m", "mean_power"]
UNITS = ("dbm", "linear")
UNIT_LABELS = {"dbm": "dBm", "linear": "linear"}


@dataclass
class CampaignStore:
    profiles: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    # fits loaded from elsewhere whose profile is not in this store
    reference_fits: dict = field(default_factory=dict)

    def add_profile(self, profile: AltitudeProfile, **provenance) -> None:
        if profile.key in self.profiles:
            raise DuplicateBin(f"profile {profile.key} already present")
        self.profiles[profile.key] = profile
        self.provenance[profile.key] = provenance

    def profile(self, band, year) -> AltitudeProfile:
        try:
            return self.profiles[(band, str(year))]
        except KeyError:
            raise UnknownProfile(f"no profile for band {band!r}, year {year}") from None

    def add_fit(self, fit: FitResult) -> None:
        key = (fit.band, fit.year)
        if key not in self.profiles:
            raise UnknownProfile(f"fit for {key} has no matching profile")
        self.fits[key] = fit

    def add_reference_fit(self, fit: FitResult) -> None:
        key = (fit.band, fit.year)
        if key in self.profiles:
            self.add_fit(fit)
        else:
            self.reference_fits[key] = fit

    def fit(self, band, year) -> FitResult:
        key = (band, str(year))
        if key in self.fits:
            return self.fits[key]
        if key in self.reference_fits:
            return self.reference_fits[key]
        raise MissingReferenceFit(f"no fit for band {band!r}, year {year}")

    def keys(self):
        return sorted(self.profiles)


def _parse_float(text, what, line):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{what} {text!r} is not a number", line) from None
    if not math.isfinite(value):
        raise ParseError(f"{what} {text!r} is not finite", line)
    return value


def read_profiles(path, unit: str, grid: AltitudeGrid = AltitudeGrid(), tol: float = 0.01
                  ) -> list[AltitudeProfile]:
    """Parse a profile CSV into linear-unit profiles, one per (band, year).

    Altitudes are snapped to ``grid``; anything farther than ``tol`` meters
    from a grid altitude raises ``OffGridAltitude``.
    """
    unit = unit.lower()
    if unit not in UNITS:
        raise UnitMismatch(f"unit must be one of {UNITS}, got {unit!r}")
    bins: dict = {}
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != HEADER:
            raise ParseError(f"header must be {','.join(HEADER)}", 1)
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise ParseError(f"expected 4 fields, got {len(row)}", line)
            band, year = row[0].strip(), row[1].strip()
            if not band or not year:
                raise ParseError("band and year must be non-empty", line)
            altitude = _parse_float(row[2], "altitude_m", line)
            value = _parse_float(row[3], "mean_power", line)
            snapped = grid.snap(altitude, tol)
            if snapped is None:
                raise OffGridAltitude(
                    f"line {line}: altitude {altitude} m is not on the "
                    f"{grid.min:g}:{grid.step:g}:{grid.max:g} m grid")
            if unit == "linear":
                if value <= 0:
                    raise UnitMismatch(f"line {line}: linear power {value} <= 0 (dB data?)")
                power = value
            else:
                power = linear_from_db(value)
                if power <= 0 or not math.isfinite(power):
                    raise ParseError(f"dBm value {value} has no positive linear power", line)
            per = bins.setdefault((band, year), {})
            if snapped in per:
                raise DuplicateBin(f"line {line}: duplicate bin {band}/{year} at {snapped} m")
            per[snapped] = power
    out = []
    for (band, year), per in sorted(bins.items()):
        alts = sorted(per)
        out.append(AltitudeProfile(band, year, tuple(alts), tuple(per[a] for a in alts),
                                   UNIT_LABELS[unit]))
    return out


def ingest_profiles(path, unit: str, grid: AltitudeGrid = AltitudeGrid(),
                    store: CampaignStore | None = None) -> CampaignStore:
    store = CampaignStore() if store is None else store
    when = datetime.now(timezone.utc).isoformat()
    for prof in read_profiles(path, unit, grid):
        store.add_profile(prof, source=str(path), ingested_at=when, unit=UNIT_LABELS[unit.lower()])
    return store


def write_profiles(profiles: Iterable[AltitudeProfile], path, unit: str = "linear") -> None:
    unit = unit.lower()
    if unit not in UNITS:
        raise UnitMismatch(f"unit must be one of {UNITS}, got {unit!r}")
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(HEADER)
        for prof in profiles:
            for a, p in zip(prof.altitudes, prof.powers):
                value = p if unit == "linear" else db_from_linear(p)
                w.writerow([prof.band, prof.year, repr(a), repr(value)])


def save_fits(fits: Iterable[FitResult], path) -> None:
    payload = [fit.to_dict() for fit in fits]
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_fits(path) -> list[FitResult]:
    return [FitResult.from_dict(d) for d in json.loads(Path(path).read_text())]
