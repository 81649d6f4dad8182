"""
Pydantic models for closed-loop evaluation.

Loop environment (mode matching and feedback phase), frequency traces and
phase-scan results.
"""

from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from src.utils.validators import normalize_phase


class TraceKind(str, Enum):
    """What the values of a FrequencyTrace represent."""

    COMPLEX_TF = "complex_tf"
    POWER_RATIO = "power_ratio"
    POWER = "power"


class LoopEnvironment(BaseModel):
    """Mode-matching factor and feedback phase of the coherent loop."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"example": {"mu": 0.84, "phi": 0.0}},
    )

    mu: float = Field(default=1.0, ge=0.0, le=1.0, description="Spatial mode-matching factor")
    phi: float = Field(default=0.0, description="Feedback phase in radians, wrapped to [0, 2pi)")

    @field_validator("phi")
    @classmethod
    def _wrap_phase(cls, v: float) -> float:
        return normalize_phase(v)

    def with_phase(self, phi: float) -> "LoopEnvironment":
        """Copy of this environment at another feedback phase."""
        return LoopEnvironment(mu=self.mu, phi=phi)


class FrequencyTrace(BaseModel):
    """
    Response values on a strictly increasing detuning grid.

    Complex traces keep real parts in ``values`` and imaginary parts in
    ``imag``; real traces leave ``imag`` unset.
    """

    model_config = ConfigDict(frozen=True)

    grid: list[float] = Field(description="Detunings in MHz, strictly increasing")
    values: list[float] = Field(description="Real response (or real part)")
    imag: list[float] | None = Field(default=None, description="Imaginary part for COMPLEX_TF")
    kind: TraceKind = Field(description="Trace semantics")

    @model_validator(mode="after")
    def _check_shape(self) -> "FrequencyTrace":
        if len(self.values) != len(self.grid):
            raise ValueError(
                f"values length {len(self.values)} != grid length {len(self.grid)}"
            )
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")
        if self.kind is TraceKind.COMPLEX_TF:
            if self.imag is None or len(self.imag) != len(self.grid):
                raise ValueError("COMPLEX_TF traces need imag of grid length")
        elif self.imag is not None:
            raise ValueError(f"{self.kind.value} traces are real; imag must be unset")
        return self

    @classmethod
    def from_arrays(cls, grid: np.ndarray, values: np.ndarray, kind: TraceKind) -> "FrequencyTrace":
        """Build a trace from numpy arrays (complex values for COMPLEX_TF)."""
        values = np.asarray(values)
        if kind is TraceKind.COMPLEX_TF:
            return cls(
                grid=np.asarray(grid, dtype=float).tolist(),
                values=np.real(values).astype(float).tolist(),
                imag=np.imag(values).astype(float).tolist(),
                kind=kind,
            )
        return cls(
            grid=np.asarray(grid, dtype=float).tolist(),
            values=np.real(values).astype(float).tolist(),
            kind=kind,
        )

    @property
    def detuning(self) -> np.ndarray:
        """Grid as a numpy array."""
        return np.asarray(self.grid, dtype=float)

    @property
    def array(self) -> np.ndarray:
        """Values as a numpy array (complex for COMPLEX_TF)."""
        real = np.asarray(self.values, dtype=float)
        if self.imag is None:
            return real
        return real + 1j * np.asarray(self.imag, dtype=float)

    def to_frame(self) -> pd.DataFrame:
        """Tabular form: detuning,value or detuning,re,im."""
        if self.kind is TraceKind.COMPLEX_TF:
            return pd.DataFrame({"detuning": self.grid, "re": self.values, "im": self.imag})
        return pd.DataFrame({"detuning": self.grid, "value": self.values})

    def to_csv(self, path: Path) -> Path:
        """Write the trace as CSV and return the path."""
        self.to_frame().to_csv(path, index=False)
        return path


class PhaseScan(BaseModel):
    """s = 0 power ratio versus feedback phase with its extrema."""

    model_config = ConfigDict(frozen=True)

    phi: list[float] = Field(description="Scanned feedback phases (rad)")
    ratio: list[float] = Field(description="Power ratio at s = 0 per phase")
    phi_min: float = Field(description="Phase of minimum ratio (negative feedback)")
    ratio_min: float = Field(ge=0.0, description="Minimum ratio")
    phi_max: float = Field(description="Phase of maximum ratio (positive feedback)")
    ratio_max: float = Field(ge=0.0, description="Maximum ratio")

    @computed_field
    @property
    def parametric_point(self) -> tuple[float, float]:
        """(max, min) coordinates of the parametric plot."""
        return (self.ratio_max, self.ratio_min)

    def to_frame(self) -> pd.DataFrame:
        """Columns: phi_rad, ratio."""
        return pd.DataFrame({"phi_rad": self.phi, "ratio": self.ratio})
