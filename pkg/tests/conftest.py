"""Shared fixtures: synthetic week-long datasets and solved scenarios
that several test modules reuse. Session-scoped because solves are the
expensive part of the suite."""

import pytest

from h2grid.economics import optimize_plant
from h2grid.ingest import synth_fixture
from h2grid.types import (
    CapacitySpec,
    CoLocated,
    Fixed,
    Mode,
    PlantParameters,
    ScenarioSpec,
)

WEEK = 168


@pytest.fixture(scope="session")
def params():
    return PlantParameters()


@pytest.fixture(scope="session")
def flat_week():
    return synth_fixture("flat", horizon=WEEK, seed=0)


@pytest.fixture(scope="session")
def diurnal_week():
    return synth_fixture("diurnal", horizon=WEEK, seed=1)


@pytest.fixture(scope="session")
def walk_week():
    return synth_fixture("random-walk", horizon=WEEK, seed=2)


@pytest.fixture(scope="session")
def contrast_week():
    return synth_fixture("two-zone-contrast", horizon=WEEK, seed=0)


def grid_only_scenario(name="grid_only"):
    """Flexible grid trade with renewables and storage pinned to zero:
    the one-knob scenario whose optimum is a closed-form expression."""
    caps = CapacitySpec(wind_kw=Fixed(0.0), pv_kw=Fixed(0.0),
                        storage_kg=Fixed(0.0))
    return ScenarioSpec(name, Mode.GRID, CoLocated("Z1"), caps)


@pytest.fixture(scope="session")
def flat_grid_only(flat_week, params):
    """Solved grid-only flexible plant on the flat week."""
    report, breakdown = optimize_plant(grid_only_scenario(), params, flat_week)
    assert report.is_optimal, report.message
    return report, breakdown
