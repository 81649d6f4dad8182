"""
Pydantic models for emulated measurement traces.
"""

from enum import Enum

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.loop import FrequencyTrace


class Scenario(str, Enum):
    """Emulated measurement scenarios."""

    SWEPT_SINE = "swept_sine"
    PHASE_SCAN = "phase_scan"
    LOCK = "lock"
    PARAMETRIC = "parametric"


class EmulationConfig(BaseModel):
    """Detector, sideband and sampling settings of an emulated measurement."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "noise_floor": 0.01,
                "sideband_offset": 30.0,
                "sideband_depth": 0.2,
                "detector_noise_seed": 7,
                "sample_count": 1001,
                "detector_noise": 0.01,
                "span": 60.0,
            }
        },
    )

    noise_floor: float = Field(
        default=0.0, ge=0.0, description="Electronic floor as a fraction of open-loop peak power"
    )
    sideband_offset: float = Field(
        default=0.0, ge=0.0, description="Detuning of the calibration sidebands (MHz)"
    )
    sideband_depth: float = Field(
        default=0.0, ge=0.0, lt=1.0, description="Relative power of each sideband"
    )
    detector_noise_seed: int | None = Field(
        default=None, ge=0, description="Noise generator seed (settings default when unset)"
    )
    sample_count: int = Field(default=1001, gt=1, description="Samples per trace")
    detector_noise: float = Field(
        default=0.0, ge=0.0, description="Relative std of multiplicative gaussian detector noise"
    )
    span: float = Field(default=30.0, gt=0.0, description="Swept-sine half span (MHz)")


class SweptSineTraces(BaseModel):
    """Open-loop, closed-loop and ratio traces of a swept-sine measurement."""

    model_config = ConfigDict(frozen=True)

    open_loop: FrequencyTrace
    closed_loop: FrequencyTrace
    ratio: FrequencyTrace

    def to_frame(self) -> pd.DataFrame:
        """Columns: detuning_mhz, open_power, closed_power, ratio."""
        return pd.DataFrame(
            {
                "detuning_mhz": self.open_loop.grid,
                "open_power_rel": self.open_loop.values,
                "closed_power_rel": self.closed_loop.values,
                "ratio": self.ratio.values,
            }
        )


class PhaseScanTrace(BaseModel):
    """Output power while the feedback phase is ramped."""

    model_config = ConfigDict(frozen=True)

    time: list[float] = Field(description="Sample index / ramp time (arb. units)")
    phi: list[float] = Field(description="Feedback phase at each sample (rad)")
    power: list[float] = Field(description="Detected closed-loop power (rel. to input)")
    open_level: float = Field(ge=0.0, description="Open-loop reference power")
    floor_level: float = Field(ge=0.0, description="Electronic noise floor")

    @model_validator(mode="after")
    def _check_lengths(self) -> "PhaseScanTrace":
        if not len(self.time) == len(self.phi) == len(self.power):
            raise ValueError("time, phi and power must have equal length")
        return self

    def to_frame(self) -> pd.DataFrame:
        """Columns: time_arb, phi_rad, power_rel, open_level_rel, floor_rel."""
        n = len(self.time)
        return pd.DataFrame(
            {
                "time_arb": self.time,
                "phi_rad": self.phi,
                "power_rel": self.power,
                "open_level_rel": [self.open_level] * n,
                "floor_rel": [self.floor_level] * n,
            }
        )


class LockTrace(BaseModel):
    """Closed-loop power and phase error signal versus feedback phase."""

    model_config = ConfigDict(frozen=True)

    phi: list[float] = Field(description="Feedback phase (rad)")
    power: list[float] = Field(description="Closed-loop power ratio at s = 0")
    error: list[float] = Field(description="Error signal d(power)/d(phi)")
    lock_phase: float = Field(description="Zero crossing at the power minimum (rad)")
    locked_ratio: float = Field(ge=0.0, description="Power ratio at the lock phase")

    def to_frame(self) -> pd.DataFrame:
        """Columns: phi_rad, power_ratio, error_per_rad."""
        return pd.DataFrame(
            {"phi_rad": self.phi, "power_ratio": self.power, "error_per_rad": self.error}
        )
