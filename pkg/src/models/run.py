"""
Pydantic models for command-line runs.

One JSON config schema shared by every command (per-command sections are
optional) plus the run manifest written next to each command's outputs.
"""

from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.cavity import CompensatorModel, PlantModel, RingCavityGeometry
from src.models.emulation import EmulationConfig
from src.models.estimation import FitBounds, FitParameters, FitWeighting
from src.models.loop import LoopEnvironment
from src.models.synthesis import GainTarget


class PlantSection(BaseModel):
    """Plant given by rates or by geometry."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma_p: float | None = Field(default=None, description="Total decay rate (MHz)")
    k1: float | None = Field(default=None, description="Input-coupler rate (MHz)")
    k4: float | None = Field(default=None, description="Output-coupler rate (MHz)")
    geometry: RingCavityGeometry | None = Field(default=None, description="Physical description")

    @model_validator(mode="after")
    def _check_source(self) -> "PlantSection":
        if self.geometry is None:
            missing = [n for n in ("gamma_p", "k1", "k4") if getattr(self, n) is None]
            if missing:
                raise ValueError(
                    f"{', '.join(missing)} required unless geometry is given"
                )
        return self

    def to_plant(self) -> PlantModel:
        """Validated PlantModel."""
        if self.geometry is not None:
            return PlantModel.from_geometry(self.geometry)
        return PlantModel(gamma_p=self.gamma_p, k1=self.k1, k4=self.k4)


class CompensatorSection(BaseModel):
    """Compensator given by (eta_K, eta_gamma) or (eta_K, gamma_c)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    eta_K: float = Field(default=1.0, ge=0.0)
    eta_gamma: float = Field(default=0.0)
    gamma_c: float | None = Field(default=None, gt=0.0, description="Overrides eta_gamma")

    def to_compensator(self, plant: PlantModel) -> CompensatorModel:
        """Validated CompensatorModel for the given plant."""
        if self.gamma_c is not None:
            return CompensatorModel.from_controller_decay(plant, self.gamma_c, self.eta_K)
        return CompensatorModel(eta_K=self.eta_K, eta_gamma=self.eta_gamma, plant_ref=plant)


class GridSection(BaseModel):
    """Uniform detuning grid."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    min: float = Field(default=-30.0)
    max: float = Field(default=30.0)
    points: int = Field(default=1001, ge=2)

    @model_validator(mode="after")
    def _check_span(self) -> "GridSection":
        if self.max <= self.min:
            raise ValueError("grid max must exceed grid min")
        return self

    def to_array(self) -> np.ndarray:
        """Grid points in MHz."""
        return np.linspace(self.min, self.max, self.points)


class SynthesisSection(BaseModel):
    """Gain optimization settings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    target: GainTarget = Field(default=GainTarget.AT_ZERO)
    band_edge: float | None = Field(default=None, gt=0.0)
    eta_K_max: float | None = Field(default=None, gt=0.0)


class ScanSection(BaseModel):
    """Phase ramp and parametric gain sweep settings for emulation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    ramp_periods: float = Field(default=2.0, gt=0.0, description="2pi periods per ramp")
    eta_K_values: list[float] = Field(
        default_factory=lambda: np.linspace(0.06, 2.2, 12).tolist(),
        description="Gain values of a parametric dataset",
    )


class RunConfig(BaseModel):
    """Shared configuration file of all commands."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    plant: PlantSection
    compensator: CompensatorSection = Field(default_factory=CompensatorSection)
    loop: LoopEnvironment = Field(default_factory=LoopEnvironment)
    grid: GridSection = Field(default_factory=GridSection)
    synthesis: SynthesisSection = Field(default_factory=SynthesisSection)
    emulation: EmulationConfig = Field(default_factory=EmulationConfig)
    scan: ScanSection = Field(default_factory=ScanSection)


class FitSpec(BaseModel):
    """Bounds file of the fit command."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma_p: float = Field(gt=0.0, description="Independently measured plant decay rate")
    bounds: FitBounds | None = Field(default=None, description="Defaults scale with gamma_p")
    initial_guess: FitParameters | None = Field(default=None)
    symmetric_couplers: bool = Field(default=False, description="Constrain k1 = k4")
    weighting: FitWeighting = Field(
        default=FitWeighting.ABSOLUTE,
        description="relative suits multiplicative detector noise",
    )


class RunManifest(BaseModel):
    """Record of one command invocation and the files it wrote."""

    model_config = ConfigDict(frozen=True)

    command: str = Field(description="Command name")
    config_digest: str = Field(description="sha256 over every input byte and flag")
    outputs: list[str] = Field(description="Written file paths (relative to the output dir)")
    version: str = Field(description="coherent-flow version")

    def verify(self, out_dir: Path) -> bool:
        """True when every listed output exists and is non-empty."""
        return all(
            (out_dir / name).is_file() and (out_dir / name).stat().st_size > 0
            for name in self.outputs
        )
