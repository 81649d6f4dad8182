"""
Resonator and loop physics for coherent-flow.

Exports:
    - Cavity model: decay rates and elementary transfer functions
    - Loop algebra: closed loop, power ratio, sweeps and phase scans
"""

from src.physics.cavity import (
    Compensator,
    compensator_tf,
    coupler_rate_from_geometry,
    decay_rate_from_geometry,
    loss_rate_from_geometry,
    plant_tf,
    power_fraction_from_rate,
)
from src.physics.loop import (
    closed_loop_sweep,
    closed_loop_tf,
    frequency_sweep,
    open_loop_sweep,
    phase_scan,
    power_ratio,
    ratio_at_zero,
    rejection_db,
    to_db,
)

__all__ = [
    # Cavity model
    "Compensator",
    "decay_rate_from_geometry",
    "coupler_rate_from_geometry",
    "loss_rate_from_geometry",
    "power_fraction_from_rate",
    "plant_tf",
    "compensator_tf",
    # Loop algebra
    "closed_loop_tf",
    "power_ratio",
    "ratio_at_zero",
    "frequency_sweep",
    "open_loop_sweep",
    "closed_loop_sweep",
    "phase_scan",
    "to_db",
    "rejection_db",
]
