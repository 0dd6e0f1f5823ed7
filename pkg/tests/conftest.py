import pytest

from aerointerf.campaigns import campaign_fit
from aerointerf.model import (EnvironmentParams, LosTransition, ModelParams, PathLossPair,
                              activity_from_normalized)
from aerointerf.profiles import AltitudeGrid


@pytest.fixture
def env():
    return EnvironmentParams()


@pytest.fixture
def pathloss():
    return PathLossPair()


@pytest.fixture
def grid():
    return AltitudeGrid()


def campaign_params(year, band, env=EnvironmentParams(), pathloss=PathLossPair()) -> ModelParams:
    row = campaign_fit(year, band)
    return ModelParams(LosTransition(row.beta, row.h0),
                       activity_from_normalized(row.c_tilde, env), pathloss)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
