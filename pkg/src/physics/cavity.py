"""
Resonator transfer functions.

Decay rates from ring-cavity geometry, the four elementary plant transfer
functions and the compensator transfer function. Evaluation accepts a
complex scalar or any numpy array of complex frequencies s = i*delta.
"""

import math
from typing import NamedTuple

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from config import get_settings
from src.models.cavity import (
    MHZ,
    Channel,
    CompensatorModel,
    PlantModel,
    ProportionalCompensator,
    RingCavityGeometry,
)
from src.utils.exceptions import PoleEvaluationError
from src.utils.validators import validate_mirror_index

Compensator = CompensatorModel | ProportionalCompensator


class PlantResponse(NamedTuple):
    """The four plant transfer functions evaluated on the same s."""

    zw: np.ndarray
    zu: np.ndarray
    yw: np.ndarray
    yu: np.ndarray

    def channel(self, channel: Channel) -> np.ndarray:
        """Response of one channel."""
        return getattr(self, channel.value)


def _rate_from_power_fraction(fraction: float, length_m: float) -> float:
    """c * fraction / (4 pi L) in MHz."""
    return SPEED_OF_LIGHT * fraction / (4.0 * math.pi * length_m) / MHZ


def decay_rate_from_geometry(geometry: RingCavityGeometry) -> float:
    """
    Total decay rate of a ring cavity.

    Args:
        geometry: Mirror transmissions, loss and round-trip length.

    Returns:
        gamma = c (t1^2 + t2^2 + t3^2 + t4^2 + l^2) / (4 pi L) in MHz.

    Example:
        >>> geom = RingCavityGeometry(t_sq=(0.0549, 0, 0, 0), l_sq=0.0, length_m=0.141)
        >>> round(decay_rate_from_geometry(geom), 2)
        9.29
    """
    return _rate_from_power_fraction(geometry.total_loss, geometry.length_m)


def coupler_rate_from_geometry(geometry: RingCavityGeometry, mirror_index: int) -> float:
    """
    Partial decay rate contributed by one mirror.

    Summing all four mirrors plus loss_rate_from_geometry reproduces
    decay_rate_from_geometry.

    Args:
        geometry: Ring cavity geometry.
        mirror_index: Zero-based mirror index (0..3).

    Returns:
        c t_i^2 / (4 pi L) in MHz.

    Raises:
        ConfigurationError: If the index is out of range.
    """
    index = validate_mirror_index(mirror_index)
    return _rate_from_power_fraction(geometry.t_sq[index], geometry.length_m)


def loss_rate_from_geometry(geometry: RingCavityGeometry) -> float:
    """Decay rate from lumped intracavity loss, c l^2 / (4 pi L) in MHz."""
    return _rate_from_power_fraction(geometry.l_sq, geometry.length_m)


def power_fraction_from_rate(rate: float, length_m: float) -> float:
    """Inverse of the decay-rate formula: the loss budget giving a rate."""
    return rate * MHZ * 4.0 * math.pi * length_m / SPEED_OF_LIGHT


def ensure_off_pole(s: np.ndarray | complex, pole: float, label: str) -> None:
    """
    Raise PoleEvaluationError when any s sits on the pole s = -pole.

    Args:
        s: Complex frequency or array of frequencies.
        pole: Decay rate; the transfer function diverges at s = -pole.
        label: Transfer-function name for the message.
    """
    tolerance = get_settings().pole_tolerance * max(abs(pole), 1.0)
    distance = np.abs(np.asarray(s) + pole)
    hits = np.flatnonzero(distance <= tolerance)
    if hits.size:
        flat = np.asarray(s).ravel()
        index = int(hits[0])
        raise PoleEvaluationError(
            f"{label} evaluated at its pole s = {-pole:.6g}",
            pole=pole,
            s=complex(flat[index]),
            index=index if flat.size > 1 else None,
        )


def plant_response(gamma_p: float, k1: float, k4: float, s: np.ndarray | complex) -> PlantResponse:
    """
    All four plant transfer functions from raw rates (no validation).

    G_zw = G_yu = -2 sqrt(k1 k4)/(s + gamma_p),
    G_zu = 1 - 2 k4/(s + gamma_p), G_yw = 1 - 2 k1/(s + gamma_p).
    """
    a = np.asarray(s, dtype=complex) + gamma_p
    zw = -2.0 * np.sqrt(k1 * k4) / a
    zu = 1.0 - 2.0 * k4 / a
    yw = 1.0 - 2.0 * k1 / a
    return PlantResponse(zw=zw, zu=zu, yw=yw, yu=zw)


def compensator_response(
    eta_K: float | np.ndarray,
    pole: float,
    k1: float,
    k4: float,
    s: np.ndarray | complex,
) -> np.ndarray:
    """K_uy = 2 sqrt(eta_K) sqrt(k1 k4) / (s + pole) from raw values (no validation)."""
    return 2.0 * np.sqrt(eta_K) * np.sqrt(k1 * k4) / (np.asarray(s, dtype=complex) + pole)


def plant_tf(plant: PlantModel, channel: Channel, s: np.ndarray | complex) -> np.ndarray | complex:
    """
    Evaluate one plant transfer function.

    Args:
        plant: Plant rates.
        channel: ZW, ZU, YW or YU (YU is identical to ZW).
        s: Complex frequency (scalar or array).

    Returns:
        Complex response with the shape of s.

    Raises:
        PoleEvaluationError: If s = -gamma_p.

    Example:
        >>> plant = PlantModel(gamma_p=9.3, k1=0.3387, k4=0.3387)
        >>> round(plant_tf(plant, Channel.ZW, 0.0).real, 4)
        -0.0728
    """
    ensure_off_pole(s, plant.gamma_p, f"G_{channel.value}")
    value = plant_response(plant.gamma_p, plant.k1, plant.k4, s).channel(Channel(channel))
    return value if np.ndim(s) else complex(value)


def compensator_tf(comp: Compensator, s: np.ndarray | complex) -> np.ndarray | complex:
    """
    Evaluate the compensator transfer function K_uy.

    Args:
        comp: Dynamic compensator (eta_K, eta_gamma about the ideal pole) or static gain.
        s: Complex frequency (scalar or array).

    Returns:
        Complex response with the shape of s.

    Raises:
        PoleEvaluationError: If s sits on the compensator pole.
    """
    if isinstance(comp, ProportionalCompensator):
        value = np.full(np.shape(s), comp.gain, dtype=complex)
        return value if np.ndim(s) else complex(comp.gain)

    plant = comp.plant_ref
    ensure_off_pole(s, comp.pole, "K_uy")
    value = compensator_response(comp.eta_K, comp.pole, plant.k1, plant.k4, s)
    return value if np.ndim(s) else complex(value)
