"""
Pydantic models for compensator synthesis results.
"""

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_serializer


class GainTarget(str, Enum):
    """Objective of the gain optimization."""

    AT_ZERO = "at_zero"
    BAND = "band"


class SynthesisResult(BaseModel):
    """Optimal compensator gain and phase with the achieved rejection."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "eta_K_opt": 0.925,
                "phi_opt": 0.0,
                "ratio_at_zero": 0.1815,
                "rejection_db": 7.41,
                "band_metric": 0.19,
                "target": "at_zero",
                "band_edge": 9.3,
            }
        },
    )

    eta_K_opt: float = Field(ge=0.0, description="Optimal gain factor")
    phi_opt: float = Field(description="Optimal feedback phase (rad)")
    ratio_at_zero: float = Field(ge=0.0, description="Power ratio at s = 0 at the optimum")
    rejection_db: float = Field(description="-10 log10(ratio_at_zero); inf for perfect nulling")
    band_metric: float | None = Field(
        default=None, ge=0.0, description="Worst-case ratio over |delta| <= band_edge"
    )
    target: GainTarget = Field(default=GainTarget.AT_ZERO, description="Optimized objective")
    band_edge: float | None = Field(default=None, gt=0.0, description="Band edge (MHz)")

    @field_serializer("rejection_db")
    def _serialize_db(self, value: float) -> float | str:
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value


class CompensatorComparison(BaseModel):
    """Band performance of the dynamic compensator against a static gain."""

    model_config = ConfigDict(frozen=True)

    band_edge: float = Field(gt=0.0, description="Band edge (MHz)")
    dynamic: SynthesisResult = Field(description="Optimized dynamic compensator")
    proportional_gain: float = Field(ge=0.0, description="Static gain matched at s = 0")
    dynamic_band_metric: float = Field(ge=0.0, description="Worst-case ratio, dynamic")
    proportional_band_metric: float = Field(ge=0.0, description="Worst-case ratio, static")
    dynamic_band_mean: float = Field(ge=0.0, description="Mean ratio over the band, dynamic")
    proportional_band_mean: float = Field(ge=0.0, description="Mean ratio over the band, static")
