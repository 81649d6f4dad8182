"""
Data models for coherent-flow.

Pydantic models for validation, serialization, and type safety.
"""

from src.models.cavity import (
    Channel,
    CompensatorModel,
    PlantModel,
    ProportionalCompensator,
    RingCavityGeometry,
)
from src.models.emulation import (
    EmulationConfig,
    LockTrace,
    PhaseScanTrace,
    Scenario,
    SweptSineTraces,
)
from src.models.estimation import (
    ConsistencyCheck,
    ConsistencyReport,
    FitBounds,
    FitParameters,
    FitResult,
    FitWeighting,
    Interval,
    MeasuredValues,
    ParametricDataset,
    ParametricPoint,
)
from src.models.loop import FrequencyTrace, LoopEnvironment, PhaseScan, TraceKind
from src.models.run import FitSpec, RunConfig, RunManifest
from src.models.synthesis import CompensatorComparison, GainTarget, SynthesisResult

__all__ = [
    # Cavity models
    "Channel",
    "RingCavityGeometry",
    "PlantModel",
    "CompensatorModel",
    "ProportionalCompensator",
    # Loop models
    "LoopEnvironment",
    "FrequencyTrace",
    "TraceKind",
    "PhaseScan",
    # Synthesis models
    "GainTarget",
    "SynthesisResult",
    "CompensatorComparison",
    # Estimation models
    "ParametricPoint",
    "ParametricDataset",
    "Interval",
    "FitBounds",
    "FitParameters",
    "FitResult",
    "FitWeighting",
    "MeasuredValues",
    "ConsistencyCheck",
    "ConsistencyReport",
    # Emulation models
    "Scenario",
    "EmulationConfig",
    "SweptSineTraces",
    "PhaseScanTrace",
    "LockTrace",
    # Run models
    "RunConfig",
    "FitSpec",
    "RunManifest",
]
