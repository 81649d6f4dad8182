"""
Measurement emulators for coherent-flow.

Exports:
    - BaseEmulator: Abstract base class
    - EmulationResponse: Standardized response model
    - SweptSineEmulator: Open/closed-loop resonance scans
    - PhaseScanEmulator: Feedback-phase ramp
    - LockEmulator: Power and phase error signal
    - ParametricEmulator: Gain sweep dataset
"""

from src.emulators.base import BaseEmulator, EmulationResponse
from src.emulators.lock import LockEmulator, emulate_lock, lock_error_signal, lock_point
from src.emulators.parametric import ParametricEmulator, emulate_parametric_dataset
from src.emulators.phase_scan import PhaseScanEmulator, emulate_phase_scan
from src.emulators.swept_sine import SweptSineEmulator, emulate_swept_sine
from src.models.emulation import Scenario
from src.utils.exceptions import ConfigurationError

__all__ = [
    "BaseEmulator",
    "EmulationResponse",
    "SweptSineEmulator",
    "PhaseScanEmulator",
    "LockEmulator",
    "ParametricEmulator",
    "emulate_swept_sine",
    "emulate_phase_scan",
    "emulate_lock",
    "emulate_parametric_dataset",
    "lock_error_signal",
    "lock_point",
    "get_emulator",
]


def get_emulator(scenario: Scenario | str) -> BaseEmulator:
    """
    Factory function to get the emulator of a scenario.

    Args:
        scenario: Scenario or its name ('swept_sine', 'phase_scan', 'lock',
            'parametric'; case-insensitive).

    Returns:
        Emulator instance.

    Raises:
        ConfigurationError: If the scenario is unknown.

    Example:
        >>> emulator = get_emulator("lock")
        >>> response = emulator.run(config)
    """
    emulators: dict[Scenario, type[BaseEmulator]] = {
        Scenario.SWEPT_SINE: SweptSineEmulator,
        Scenario.PHASE_SCAN: PhaseScanEmulator,
        Scenario.LOCK: LockEmulator,
        Scenario.PARAMETRIC: ParametricEmulator,
    }

    try:
        key = Scenario(scenario.lower()) if isinstance(scenario, str) else scenario
    except ValueError as e:
        raise ConfigurationError(
            f"Unknown scenario: {scenario}. Available: {[s.value for s in emulators]}"
        ) from e

    return emulators[key]()
