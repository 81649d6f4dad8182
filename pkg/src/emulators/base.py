"""
Base emulator and shared response model.

All emulators inherit from BaseEmulator and return EmulationResponse.
"""

from abc import ABC, abstractmethod
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from config import get_settings
from src.models.emulation import EmulationConfig, Scenario
from src.models.run import RunConfig


class EmulationResponse(BaseModel):
    """Standardized response from all emulators."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    scenario: Scenario = Field(description="Emulated scenario")
    tables: dict[str, pd.DataFrame] = Field(
        default_factory=dict, description="Output tables keyed by file stem"
    )
    metadata: dict[str, Any] = Field(default_factory=dict, description="Scalar results")

    @classmethod
    def success_response(
        cls,
        scenario: Scenario,
        tables: dict[str, pd.DataFrame],
        seed: int,
        **metadata: Any,
    ) -> "EmulationResponse":
        """Create a response; metadata is deterministic (no timestamps)."""
        return cls(
            scenario=scenario,
            tables=tables,
            metadata={
                "scenario": scenario.value,
                "seed": seed,
                "rows": {name: len(frame) for name, frame in tables.items()},
                **metadata,
            },
        )


def resolve_seed(cfg: EmulationConfig) -> int:
    """Configured seed, or the settings default."""
    if cfg.detector_noise_seed is None:
        return get_settings().default_seed
    return cfg.detector_noise_seed


def detector_noise(
    rng: np.random.Generator,
    relative_std: float,
    size: int,
) -> np.ndarray:
    """
    Multiplicative gaussian detector gain, 1 + relative_std * N(0, 1).

    Draws nothing when relative_std is zero so noiseless traces are exact.
    """
    if relative_std == 0.0:
        return np.ones(size)
    return 1.0 + relative_std * rng.standard_normal(size)


class BaseEmulator(ABC):
    """
    Abstract base class for all emulated measurements.

    All emulators must implement run and return an EmulationResponse
    whose tables are ready to be written as CSV.
    """

    scenario: Scenario

    @abstractmethod
    def run(self, config: RunConfig) -> EmulationResponse:
        """
        Emulate the scenario for a run configuration.

        Args:
            config: Plant, compensator, loop and emulation settings.

        Returns:
            EmulationResponse with tables and scalar metadata.
        """
        pass
