"""
Feedback-phase lock signal.

A small phase dither demodulated synchronously yields, to first order, the
derivative of detected power with respect to the feedback phase. Its zero
crossing at the power minimum is the negative-feedback lock point.
"""

import math

import numpy as np
from scipy.optimize import brentq

from config import get_settings
from config.logging import get_logger
from src.emulators.base import BaseEmulator, EmulationResponse, detector_noise, resolve_seed
from src.models.cavity import PlantModel
from src.models.emulation import EmulationConfig, LockTrace, Scenario
from src.models.run import RunConfig
from src.physics.cavity import Compensator
from src.physics.loop import phase_scan, ratio_at_zero
from src.utils.decorators import log_execution_time
from src.utils.exceptions import NumericalError
from src.utils.validators import normalize_phase

logger = get_logger(__name__)

SCAN_POINTS = 721
BRACKET_HALF_WIDTH = 0.25


def lock_error_signal(
    plant: PlantModel,
    comp: Compensator,
    mu: float,
    phi: float | np.ndarray,
    step: float | None = None,
) -> float | np.ndarray:
    """
    Error signal d(ratio)/d(phi) at s = 0 by central difference.

    Args:
        plant: Plant rates.
        comp: Compensator.
        mu: Mode-matching factor.
        phi: Feedback phase(s) in radians.
        step: Difference step (default lock_step from settings).

    Returns:
        Derivative with the shape of phi; identically zero when eta_K = 0.
    """
    h = step or get_settings().lock_step
    phi = np.asarray(phi, dtype=float)
    upper = np.asarray(ratio_at_zero(plant, comp, mu, phi + h), dtype=float)
    lower = np.asarray(ratio_at_zero(plant, comp, mu, phi - h), dtype=float)
    error = (upper - lower) / (2.0 * h)
    return error if error.ndim else float(error)


def lock_point(plant: PlantModel, comp: Compensator, mu: float) -> float:
    """
    Phase of the error-signal zero crossing at the power minimum.

    The phase-scan minimum seeds a bracket of +/- 0.25 rad in which the
    crossing is solved with Brent's method.

    Returns:
        Lock phase in [0, 2pi).

    Raises:
        NumericalError: If the error signal has no sign change around the
            minimum (for example without feedback, eta_K = 0).
    """
    scan = phase_scan(plant, comp, mu, np.linspace(0.0, 2.0 * math.pi, SCAN_POINTS))
    low = scan.phi_min - BRACKET_HALF_WIDTH
    high = scan.phi_min + BRACKET_HALF_WIDTH

    def error(p: float) -> float:
        return float(lock_error_signal(plant, comp, mu, p))

    e_low, e_high = error(low), error(high)
    if not (e_low < 0.0 < e_high):
        raise NumericalError(
            "Error signal has no zero crossing around the power minimum",
            {"phi_min": scan.phi_min, "error_low": e_low, "error_high": e_high},
        )
    crossing = brentq(error, low, high, xtol=1e-12)
    logger.debug("Lock point %.8f rad (scan minimum %.8f rad)", crossing, scan.phi_min)
    return normalize_phase(crossing)


def _centered(phi: float) -> float:
    """Map a phase into [-pi, pi)."""
    return normalize_phase(phi + math.pi) - math.pi


@log_execution_time
def emulate_lock(
    plant: PlantModel,
    comp: Compensator,
    mu: float,
    cfg: EmulationConfig,
) -> LockTrace:
    """
    Emulate power and error signal across one turn of the feedback phase.

    The phase runs over [-pi, pi) so a lock at phi = 0 sits mid-trace.
    Detector noise multiplies both channels and leaves zero crossings fixed.

    Args:
        plant: Plant rates.
        comp: Compensator with eta_K > 0.
        mu: Mode-matching factor.
        cfg: Sample count and detector noise.

    Returns:
        LockTrace with the solved lock phase and the ratio there.
    """
    phases = np.linspace(-math.pi, math.pi, cfg.sample_count, endpoint=False)
    rng = np.random.default_rng(resolve_seed(cfg))

    power = np.asarray(ratio_at_zero(plant, comp, mu, phases), dtype=float)
    error = np.asarray(lock_error_signal(plant, comp, mu, phases), dtype=float)
    power = power * detector_noise(rng, cfg.detector_noise, phases.size)
    error = error * detector_noise(rng, cfg.detector_noise, phases.size)

    lock_phase = lock_point(plant, comp, mu)
    return LockTrace(
        phi=phases.tolist(),
        power=power.tolist(),
        error=error.tolist(),
        lock_phase=_centered(lock_phase),
        locked_ratio=float(ratio_at_zero(plant, comp, mu, lock_phase)),
    )


class LockEmulator(BaseEmulator):
    """Closed-loop power and phase error signal for locking."""

    scenario = Scenario.LOCK

    def run(self, config: RunConfig) -> EmulationResponse:
        plant = config.plant.to_plant()
        comp = config.compensator.to_compensator(plant)
        trace = emulate_lock(plant, comp, config.loop.mu, config.emulation)
        logger.info("Lock: phase %.6f rad, ratio %.6g", trace.lock_phase, trace.locked_ratio)
        return EmulationResponse.success_response(
            self.scenario,
            {"lock": trace.to_frame()},
            seed=resolve_seed(config.emulation),
            lock_phase=trace.lock_phase,
            locked_ratio=trace.locked_ratio,
        )
