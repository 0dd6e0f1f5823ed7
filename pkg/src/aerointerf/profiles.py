from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AltitudeGrid:
    """Regular altitude binning ``min, min + step, ..., max`` in meters."""

    min: float = 10.0
    max: float = 160.0
    step: float = 5.0

    def __post_init__(self):
        if not (self.step > 0):
            raise ValueError("grid step must be > 0")
        if not (self.min < self.max):
            raise ValueError("grid min must be < max")

    @property
    def size(self) -> int:
        return int(math.floor((self.max - self.min) / self.step + 1e-9)) + 1

    def altitudes(self) -> np.ndarray:
        return self.min + self.step * np.arange(self.size, dtype=float)

    def snap(self, altitude: float, tol: float = 0.01):
        """Return the grid altitude within ``tol`` of ``altitude``, else None."""
        k = round((altitude - self.min) / self.step)
        if k < 0 or k >= self.size:
            return None
        snapped = self.min + self.step * k
        return float(snapped) if abs(snapped - altitude) <= tol else None


@dataclass(frozen=True)
class AltitudeProfile:
    """Altitude-binned mean received power for one band and campaign year.

    ``powers`` are linear; ``unit`` records the declaration the data was
    ingested with (e.g. ``"dBm"``), which is metadata only since every model
    expression is scale-equivariant.
    """

    band: str
    year: str
    altitudes: tuple
    powers: tuple
    unit: str = "linear"

    def __post_init__(self):
        alt = tuple(float(a) for a in self.altitudes)
        pw = tuple(float(p) for p in self.powers)
        object.__setattr__(self, "altitudes", alt)
        object.__setattr__(self, "powers", pw)
        object.__setattr__(self, "year", str(self.year))
        if len(alt) != len(pw):
            raise ValueError("altitudes and powers must have equal length")
        if not alt:
            raise ValueError("profile has no bins")
        if any(b <= a for a, b in zip(alt, alt[1:])):
            raise ValueError("altitudes must be strictly increasing")
        if not all(math.isfinite(a) for a in alt):
            raise ValueError("altitudes must be finite")
        if not all(math.isfinite(p) and p > 0 for p in pw):
            raise ValueError("powers must be finite and > 0")

    @property
    def key(self) -> tuple[str, str]:
        return (self.band, self.year)

    @property
    def h(self) -> np.ndarray:
        return np.array(self.altitudes)

    @property
    def y(self) -> np.ndarray:
        return np.array(self.powers)

    def __len__(self):
        return len(self.altitudes)

    def power_at(self, altitude: float):
        """Exact-match lookup; returns None when no bin sits at ``altitude``."""
        try:
            return self.powers[self.altitudes.index(float(altitude))]
        except ValueError:
            return None

    def scaled(self, k: float) -> "AltitudeProfile":
        return AltitudeProfile(self.band, self.year, self.altitudes,
                               tuple(k * p for p in self.powers), self.unit)
