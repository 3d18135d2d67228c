"""Shared fixtures: a polished hexagon at |E_in|^2 = 1.2 and the passive cavity."""

import pytest
import structlog

from src.config.run_config import RunConfig
from src.models.domain import HexSteadyState
from src.workflows.operating_point import polished_hexagon

HEXAGON_DRIVE = 1.2


@pytest.fixture(autouse=True)
def _restore_structlog_config():
    # CLI tests call configure_logging(), which binds the logger to the
    # per-test captured stderr; restore the prior config so later tests
    # don't log to a closed stream.
    saved = structlog.get_config()
    yield
    structlog.configure(**saved)


@pytest.fixture(scope="session")
def run_config() -> RunConfig:
    return RunConfig()


@pytest.fixture(scope="session")
def polished(run_config):
    return polished_hexagon(run_config, HEXAGON_DRIVE)


@pytest.fixture(scope="session")
def hexagon(polished) -> HexSteadyState:
    return polished.hexagon


@pytest.fixture
def passive_hexagon() -> HexSteadyState:
    return HexSteadyState(beta0=0.0, beta_mag=0.0, phi=0.0)
