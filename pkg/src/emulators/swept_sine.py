"""
Swept-sine transfer-function measurement.

The probe laser is scanned across the plant resonance and the output power
is recorded with the loop open and closed. Calibration sidebands appear as
shifted replicas of each trace; the electronic floor is a constant offset.
"""

import numpy as np

from config.logging import get_logger
from src.emulators.base import BaseEmulator, EmulationResponse, detector_noise, resolve_seed
from src.models.cavity import PlantModel
from src.models.emulation import EmulationConfig, Scenario, SweptSineTraces
from src.models.loop import FrequencyTrace, LoopEnvironment, TraceKind
from src.models.run import RunConfig
from src.physics.cavity import Compensator, plant_response
from src.physics.loop import power_ratio
from src.utils.decorators import log_execution_time

logger = get_logger(__name__)


def _with_sidebands(trace_at, detuning: np.ndarray, cfg: EmulationConfig) -> np.ndarray:
    """Carrier plus replicas shifted by +/- sideband_offset and scaled by depth."""
    total = trace_at(detuning)
    if cfg.sideband_depth > 0.0 and cfg.sideband_offset > 0.0:
        total = total + cfg.sideband_depth * (
            trace_at(detuning - cfg.sideband_offset) + trace_at(detuning + cfg.sideband_offset)
        )
    return total


@log_execution_time
def emulate_swept_sine(
    plant: PlantModel,
    comp: Compensator,
    env: LoopEnvironment,
    cfg: EmulationConfig,
) -> SweptSineTraces:
    """
    Emulate open- and closed-loop swept-sine traces and their ratio.

    Powers are relative to the input power. The floor is noise_floor times
    the open-loop peak |G_zw(0)|^2. The ratio trace divides the closed by
    the open trace after subtracting the floor.

    Args:
        plant: Plant rates.
        comp: Compensator.
        env: Mode matching and feedback phase.
        cfg: Span, sample count, sidebands, floor and detector noise.

    Returns:
        SweptSineTraces on sample_count detunings in [-span, span].

    Example:
        >>> traces = emulate_swept_sine(plant, comp, env, EmulationConfig())
        >>> traces.ratio.array.min() < 1.0
        True
    """
    detuning = np.linspace(-cfg.span, cfg.span, cfg.sample_count)

    def open_power(delta: np.ndarray) -> np.ndarray:
        g_zw = plant_response(plant.gamma_p, plant.k1, plant.k4, 1j * delta).zw
        return np.abs(g_zw) ** 2

    def closed_power(delta: np.ndarray) -> np.ndarray:
        return power_ratio(plant, comp, env, 1j * delta) * open_power(delta)

    floor = cfg.noise_floor * float(open_power(np.zeros(1))[0])
    rng = np.random.default_rng(resolve_seed(cfg))
    open_trace = (_with_sidebands(open_power, detuning, cfg) + floor) * detector_noise(
        rng, cfg.detector_noise, detuning.size
    )
    closed_trace = (_with_sidebands(closed_power, detuning, cfg) + floor) * detector_noise(
        rng, cfg.detector_noise, detuning.size
    )

    signal = open_trace - floor
    ratio = np.divide(
        closed_trace - floor,
        signal,
        out=np.full(detuning.size, np.nan),
        where=signal > 0.0,
    )
    if np.isnan(ratio).any():
        undefined = int(np.isnan(ratio).sum())
        logger.warning("%d ratio samples undefined (open trace below floor)", undefined)

    return SweptSineTraces(
        open_loop=FrequencyTrace.from_arrays(detuning, open_trace, TraceKind.POWER),
        closed_loop=FrequencyTrace.from_arrays(detuning, closed_trace, TraceKind.POWER),
        ratio=FrequencyTrace.from_arrays(detuning, ratio, TraceKind.POWER_RATIO),
    )


class SweptSineEmulator(BaseEmulator):
    """Swept-sine scan of the plant resonance, loop open and closed."""

    scenario = Scenario.SWEPT_SINE

    def run(self, config: RunConfig) -> EmulationResponse:
        plant = config.plant.to_plant()
        comp = config.compensator.to_compensator(plant)
        traces = emulate_swept_sine(plant, comp, config.loop, config.emulation)
        ratio = traces.ratio.array
        inner = np.abs(traces.ratio.detuning) <= plant.gamma_p
        logger.info("Swept sine: %d samples, span +/-%.3g MHz", ratio.size, config.emulation.span)
        return EmulationResponse.success_response(
            self.scenario,
            {"swept_sine": traces.to_frame()},
            seed=resolve_seed(config.emulation),
            ratio_min=float(np.nanmin(ratio)),
            ratio_max_within_linewidth=float(np.nanmax(ratio[inner])) if inner.any() else None,
        )
