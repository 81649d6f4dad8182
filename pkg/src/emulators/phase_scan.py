"""
Feedback-phase ramp at the plant resonance.

Ramping the feedback path length sweeps the loop between negative and
positive feedback; the detector sees the s = 0 power ratio times the
open-loop resonant power, on top of the electronic floor.
"""

import math

import numpy as np

from config.logging import get_logger
from src.emulators.base import BaseEmulator, EmulationResponse, detector_noise, resolve_seed
from src.models.cavity import PlantModel
from src.models.emulation import EmulationConfig, PhaseScanTrace, Scenario
from src.models.run import RunConfig
from src.physics.cavity import Compensator, plant_response
from src.physics.loop import phase_scan, ratio_at_zero
from src.utils.decorators import log_execution_time
from src.utils.exceptions import ConfigurationError

logger = get_logger(__name__)


def phase_ramp(cfg: EmulationConfig, periods: float) -> np.ndarray:
    """Linear ramp over `periods` full turns with sample_count samples."""
    return np.linspace(0.0, 2.0 * math.pi * periods, cfg.sample_count)


@log_execution_time
def emulate_phase_scan(
    plant: PlantModel,
    comp: Compensator,
    mu: float,
    cfg: EmulationConfig,
    phi_ramp: np.ndarray | None = None,
) -> PhaseScanTrace:
    """
    Emulate detected power while the feedback phase is ramped.

    Args:
        plant: Plant rates.
        comp: Compensator.
        mu: Mode-matching factor.
        cfg: Floor, detector noise and (for the default ramp) sample count.
        phi_ramp: Strictly increasing phases; defaults to one full turn.

    Returns:
        PhaseScanTrace with the open-loop and floor reference levels.

    Raises:
        ConfigurationError: If the ramp is not strictly increasing.
    """
    phases = phase_ramp(cfg, 1.0) if phi_ramp is None else np.asarray(phi_ramp, dtype=float)
    if phases.size < 2 or not np.all(np.diff(phases) > 0.0):
        raise ConfigurationError("Phase ramp must be strictly increasing with at least two samples")

    open_power = float(np.abs(plant_response(plant.gamma_p, plant.k1, plant.k4, 0.0).zw) ** 2)
    floor = cfg.noise_floor * open_power
    rng = np.random.default_rng(resolve_seed(cfg))

    ratio = np.asarray(ratio_at_zero(plant, comp, mu, phases), dtype=float)
    power = (ratio * open_power + floor) * detector_noise(rng, cfg.detector_noise, phases.size)

    return PhaseScanTrace(
        time=np.linspace(0.0, 1.0, phases.size).tolist(),
        phi=phases.tolist(),
        power=power.tolist(),
        open_level=open_power + floor,
        floor_level=floor,
    )


class PhaseScanEmulator(BaseEmulator):
    """Feedback-phase ramp recorded at zero detuning."""

    scenario = Scenario.PHASE_SCAN

    def run(self, config: RunConfig) -> EmulationResponse:
        plant = config.plant.to_plant()
        comp = config.compensator.to_compensator(plant)
        mu = config.loop.mu
        ramp = phase_ramp(config.emulation, config.scan.ramp_periods)
        trace = emulate_phase_scan(plant, comp, mu, config.emulation, ramp)
        extrema = phase_scan(plant, comp, mu, np.linspace(0.0, 2.0 * math.pi, 361))
        logger.info(
            "Phase scan: %d samples over %.3g turns, ratio %.4g..%.4g",
            len(trace.phi),
            config.scan.ramp_periods,
            extrema.ratio_min,
            extrema.ratio_max,
        )
        return EmulationResponse.success_response(
            self.scenario,
            {"phase_scan": trace.to_frame()},
            seed=resolve_seed(config.emulation),
            open_level=trace.open_level,
            floor_level=trace.floor_level,
            phi_min=extrema.phi_min,
            ratio_min=extrema.ratio_min,
            phi_max=extrema.phi_max,
            ratio_max=extrema.ratio_max,
        )
