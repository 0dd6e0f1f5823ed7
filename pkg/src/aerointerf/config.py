"""Run configuration (JSON) with defaults for the standard measurement setup.

Defaults: exponents (2.2, 3.6), density 1e-3 m^-2, guard radius 20 m, unit
antenna gains, and 5 m bins over 10-160 m.  ``$AEROINTERF_CONFIG`` names a
config file used when none is given explicitly.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .estimation import FitOptions
from .field import ShadowingSpec, SimulationSpec
from .model import EnvironmentParams, PathLossPair
from .profiles import AltitudeGrid

CONFIG_ENV_VAR = "AEROINTERF_CONFIG"


@dataclass(frozen=True)
class TransferBins:
    h1: float = 40.0
    h2: float = 100.0


@dataclass(frozen=True)
class RunConfig:
    environment: EnvironmentParams = field(default_factory=EnvironmentParams)
    pathloss: PathLossPair = field(default_factory=PathLossPair)
    grid: AltitudeGrid = field(default_factory=AltitudeGrid)
    fit: FitOptions = field(default_factory=FitOptions)
    transfer: TransferBins = field(default_factory=TransferBins)
    simulation: SimulationSpec = field(default_factory=SimulationSpec)
    shadowing: ShadowingSpec = field(default_factory=ShadowingSpec)

    def to_dict(self) -> dict:
        d = asdict(self)
        # the JSON key is "lambda"; the attribute avoids the keyword
        d["environment"]["lambda"] = d["environment"].pop("lambda_")
        for key in ("beta_bounds", "h0_bounds"):
            d["fit"][key] = list(d["fit"][key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        sections = {f.name: f for f in fields(cls)}
        unknown = set(d) - set(sections)
        if unknown:
            raise ValueError(f"unknown config sections: {sorted(unknown)}")
        kwargs = {}
        for name, f in sections.items():
            if name not in d:
                continue
            section = dict(d[name])
            if name == "environment" and "lambda" in section:
                section["lambda_"] = section.pop("lambda")
            default = f.default_factory()
            allowed = {x.name for x in fields(default)}
            bad = set(section) - allowed
            if bad:
                raise ValueError(f"unknown keys in config section {name!r}: {sorted(bad)}")
            kwargs[name] = replace(default, **section)
        return cls(**kwargs)

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, simulation=replace(self.simulation, rng_seed=int(seed)))


def load_config(path=None) -> RunConfig:
    """Load ``path``, else ``$AEROINTERF_CONFIG``, else built-in defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    if path is None:
        return RunConfig()
    with open(path) as f:
        return RunConfig.from_dict(json.load(f))


def save_config(config: RunConfig, path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")
