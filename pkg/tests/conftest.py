"""Shared fixtures: reference setup, configs and clean settings."""

import json
import logging
from pathlib import Path

import pytest

from config import get_settings
from src.models.cavity import CompensatorModel, PlantModel
from src.models.loop import LoopEnvironment
from src.physics.reference import (
    MODE_MATCHING,
    reference_eta_gamma,
    reference_measurements,
    reference_plant,
)


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are cached; rebuild them around every test."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop handlers that setup_logging bound to a captured stream."""
    yield
    root = logging.getLogger()
    for handler in root.handlers[:]:
        root.removeHandler(handler)
        handler.close()


@pytest.fixture
def plant() -> PlantModel:
    """Reference plant: gamma_p = 9.3 MHz, k1 = k4 from t^2 = 0.002 at 14.1 cm."""
    return reference_plant()


@pytest.fixture
def mu() -> float:
    return MODE_MATCHING


@pytest.fixture
def eta_gamma(plant) -> float:
    """Measured-controller deviation, -gamma_p / 14."""
    return reference_eta_gamma(plant)


@pytest.fixture
def positive_eta_gamma(plant) -> float:
    return plant.gamma_p / 14.0


@pytest.fixture
def env(mu) -> LoopEnvironment:
    return LoopEnvironment(mu=mu, phi=0.0)


@pytest.fixture
def ideal(plant) -> CompensatorModel:
    return CompensatorModel(eta_K=1.0, eta_gamma=0.0, plant_ref=plant)


@pytest.fixture
def measured():
    return reference_measurements()


@pytest.fixture
def write_json(tmp_path):
    """Write a payload to tmp_path/<name> and return the path."""

    def _write(name: str, payload) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return path

    return _write


@pytest.fixture
def run_config(plant, positive_eta_gamma, mu) -> dict:
    """Run config at the optimum for eta_gamma = +gamma_p / 14."""
    return {
        "plant": {"gamma_p": plant.gamma_p, "k1": plant.k1, "k4": plant.k4},
        "compensator": {"eta_K": 0.927, "eta_gamma": positive_eta_gamma},
        "loop": {"mu": mu, "phi": 0.0},
    }
