"""
Closed-loop algebra of the coherent-feedback loop.

Composes the closed-loop transfer function from w to z and the
mode-matching-corrected power ratio, both with the compensator replaced by
its phase-rotated effective value e^{i phi} K_uy and sqrt(mu) on the loop
gain. Provides frequency sweeps and feedback-phase scans.
"""

import contextlib
import math
from typing import Iterator, Literal, NamedTuple, overload

import numpy as np
from scipy.optimize import minimize_scalar

from config import get_settings
from config.logging import get_logger
from src.models.cavity import PlantModel, ProportionalCompensator
from src.models.loop import FrequencyTrace, LoopEnvironment, PhaseScan, TraceKind
from src.physics.cavity import (
    Compensator,
    compensator_response,
    ensure_off_pole,
    plant_response,
)
from src.utils.exceptions import AlgebraicLoopError, CoherentFlowError, NumericalError
from src.utils.validators import normalize_phase, validate_detuning_grid, validate_phase_grid

logger = get_logger(__name__)


class LoopTerms(NamedTuple):
    """Intermediate quantities of one loop evaluation."""

    g_zw: np.ndarray
    closed_loop: np.ndarray
    s_m: np.ndarray | None
    s_u: np.ndarray | None
    loop_gain: np.ndarray


def _compensator_terms(
    plant: PlantModel,
    comp: Compensator,
    s: np.ndarray,
    eta_K: float | np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray | None]:
    """
    K_uy(s) and the cancelled ratio K_uy(s)/G_zw(s).

    The ratio is None for a static compensator on a plant with k1 k4 = 0,
    where G_zw vanishes identically.
    """
    a = s + plant.gamma_p
    if isinstance(comp, ProportionalCompensator):
        k = np.full(np.shape(s), comp.gain, dtype=complex)
        coupling = 2.0 * math.sqrt(plant.k1 * plant.k4)
        if coupling == 0.0:
            return k, None
        return k, -comp.gain * a / coupling

    ensure_off_pole(s, comp.pole, "K_uy")
    gain = comp.eta_K if eta_K is None else np.asarray(eta_K, dtype=float)
    k = compensator_response(gain, comp.pole, plant.k1, plant.k4, s)
    # K_uy / G_zw with the sqrt(k1 k4) factors cancelled
    return k, -np.sqrt(gain) * a / (s + comp.pole)


def loop_terms(
    plant: PlantModel,
    comp: Compensator,
    mu: float,
    phi: float | np.ndarray,
    s: complex | np.ndarray,
    eta_K: float | np.ndarray | None = None,
) -> LoopTerms:
    """
    Evaluate every loop quantity on broadcast (phi, s) arrays.

    eta_K, when given, overrides the dynamic compensator gain and may be an
    array broadcasting against phi and s (gain sweeps).

    Raises:
        PoleEvaluationError: On a plant or compensator pole.
        AlgebraicLoopError: When |1 - e^{i phi} sqrt(mu) K_uy G_yu| is below tolerance.
    """
    s = np.asarray(s, dtype=complex)
    ensure_off_pole(s, plant.gamma_p, "G")
    resp = plant_response(plant.gamma_p, plant.k1, plant.k4, s)
    k, k_over_zw = _compensator_terms(plant, comp, s, eta_K)

    rotation = np.exp(1j * np.asarray(phi, dtype=float))
    sqrt_mu = math.sqrt(mu)
    loop_gain = sqrt_mu * rotation * k * resp.yu
    denominator = 1.0 - loop_gain

    tolerance = get_settings().loop_singularity_tolerance
    magnitude = np.abs(denominator)
    singular = np.flatnonzero(magnitude <= tolerance)
    if singular.size:
        index = int(singular[0])
        raise AlgebraicLoopError(
            f"Singular loop denominator |1 - L| = {magnitude.ravel()[index]:.3g}",
            magnitude=float(magnitude.ravel()[index]),
            tolerance=tolerance,
            index=index if magnitude.size > 1 else None,
        )

    closed = resp.zw + resp.zu * rotation * k * resp.yw / denominator
    s_u = s_m = None
    if k_over_zw is not None:
        s_u = rotation * k_over_zw * resp.yw
        s_m = resp.zu * s_u / denominator
    return LoopTerms(
        g_zw=np.broadcast_to(resp.zw, closed.shape),
        closed_loop=closed,
        s_m=s_m,
        s_u=s_u,
        loop_gain=loop_gain,
    )


def ratio_from_terms(terms: LoopTerms, mu: float) -> np.ndarray:
    """
    |1 + sqrt(mu) S_m|^2 + (1 - mu)|S_u|^2.

    Raises:
        NumericalError: When S_m is undefined (static compensator, k1 k4 = 0).
    """
    if terms.s_m is None or terms.s_u is None:
        raise NumericalError(
            "Power ratio undefined: the open-loop output G_zw vanishes for a static "
            "compensator without input and output coupling"
        )
    return np.abs(1.0 + math.sqrt(mu) * terms.s_m) ** 2 + (1.0 - mu) * np.abs(terms.s_u) ** 2


def _as_output(value: np.ndarray, s: complex | np.ndarray):
    return value if np.ndim(s) else value.item()


def closed_loop_tf(
    plant: PlantModel,
    comp: Compensator,
    env: LoopEnvironment,
    s: complex | np.ndarray,
) -> complex | np.ndarray:
    """
    Closed-loop transfer function from w to z.

    G_zw + G_zu (1 - e^{i phi} sqrt(mu) K_uy G_yu)^{-1} e^{i phi} K_uy G_yw;
    with mu = 1 and phi = 0 this is the textbook composition.

    Args:
        plant: Plant rates.
        comp: Compensator.
        env: Mode matching and feedback phase.
        s: Complex frequency (scalar or array).

    Returns:
        Complex response with the shape of s.
    """
    terms = loop_terms(plant, comp, env.mu, env.phi, s)
    return _as_output(terms.closed_loop, s)


def power_ratio(
    plant: PlantModel,
    comp: Compensator,
    env: LoopEnvironment,
    s: complex | np.ndarray,
) -> float | np.ndarray:
    """
    Closed-loop to open-loop output power ratio with mode-matching correction.

    |1 + sqrt(mu) S_m|^2 + (1 - mu)|S_u|^2 with
    S_m = G_zw^-1 G_zu (1 - sqrt(mu) K G_yu)^-1 K G_yw, S_u = G_zw^-1 K G_yw
    and K = e^{i phi} K_uy. phi = 0 is negative feedback, phi = pi positive.

    Example:
        >>> plant = PlantModel(gamma_p=9.3, k1=0.3387, k4=0.3387)
        >>> comp = CompensatorModel(eta_K=0.0, eta_gamma=0.0, plant_ref=plant)
        >>> power_ratio(plant, comp, LoopEnvironment(mu=0.84), 0.0)
        1.0
    """
    terms = loop_terms(plant, comp, env.mu, env.phi, s)
    return _as_output(ratio_from_terms(terms, env.mu), s)


def ratio_at_zero(
    plant: PlantModel,
    comp: Compensator,
    mu: float,
    phi: float | np.ndarray,
) -> float | np.ndarray:
    """s = 0 power ratio, vectorized over the feedback phase."""
    terms = loop_terms(plant, comp, mu, phi, 0.0)
    return _as_output(ratio_from_terms(terms, mu), phi)


def to_db(ratio: float) -> float:
    """10 log10(ratio); -inf for a zero ratio."""
    if ratio <= 0.0:
        return -math.inf
    return 10.0 * math.log10(ratio)


def rejection_db(ratio: float) -> float:
    """Disturbance rejection in dB, -10 log10(ratio); inf for perfect nulling."""
    return -to_db(ratio)


@contextlib.contextmanager
def _located_on(grid: np.ndarray) -> Iterator[None]:
    """Attach the offending detuning to evaluation errors raised on a grid."""
    try:
        yield
    except CoherentFlowError as e:
        index = getattr(e, "index", None)
        if index is not None and index < grid.size:
            e.details["detuning"] = float(grid[index])
            e.message = f"{e.message} at detuning {grid[index]:.6g} MHz"
            e.args = (e.message,)
        raise


def open_loop_sweep(plant: PlantModel, grid) -> FrequencyTrace:
    """POWER trace of |G_zw(i delta)|^2 over the grid."""
    detuning = validate_detuning_grid(grid)
    s = 1j * detuning
    with _located_on(detuning):
        ensure_off_pole(s, plant.gamma_p, "G_zw")
    g_zw = plant_response(plant.gamma_p, plant.k1, plant.k4, s).zw
    return FrequencyTrace.from_arrays(detuning, np.abs(g_zw) ** 2, TraceKind.POWER)


@overload
def frequency_sweep(
    plant: PlantModel,
    comp: Compensator,
    env: LoopEnvironment,
    grid,
    include_open_loop: Literal[False] = False,
) -> FrequencyTrace: ...


@overload
def frequency_sweep(
    plant: PlantModel,
    comp: Compensator,
    env: LoopEnvironment,
    grid,
    include_open_loop: Literal[True],
) -> tuple[FrequencyTrace, FrequencyTrace]: ...


def frequency_sweep(plant, comp, env, grid, include_open_loop=False):
    """
    Power-ratio sweep over detunings, s = i delta.

    Args:
        plant: Plant rates.
        comp: Compensator.
        env: Mode matching and feedback phase.
        grid: Strictly increasing detunings (MHz).
        include_open_loop: Also return the |G_zw|^2 companion trace.

    Returns:
        POWER_RATIO trace, or (ratio trace, open-loop trace).

    Raises:
        PoleEvaluationError, AlgebraicLoopError: With the offending detuning
            in ``details["detuning"]``.
    """
    detuning = validate_detuning_grid(grid)
    with _located_on(detuning):
        ratio = power_ratio(plant, comp, env, 1j * detuning)
    trace = FrequencyTrace.from_arrays(detuning, ratio, TraceKind.POWER_RATIO)
    if include_open_loop:
        return trace, open_loop_sweep(plant, detuning)
    return trace


def closed_loop_sweep(
    plant: PlantModel,
    comp: Compensator,
    env: LoopEnvironment,
    grid,
) -> FrequencyTrace:
    """COMPLEX_TF trace of the closed-loop transfer function over detunings."""
    detuning = validate_detuning_grid(grid)
    with _located_on(detuning):
        values = closed_loop_tf(plant, comp, env, 1j * detuning)
    return FrequencyTrace.from_arrays(detuning, values, TraceKind.COMPLEX_TF)


def _refine_extremum(
    objective,
    center: float,
    half_width: float,
) -> tuple[float, float]:
    """Bounded scalar refinement of a grid extremum; returns (phase, value)."""
    result = minimize_scalar(
        objective,
        bounds=(center - half_width, center + half_width),
        method="bounded",
        options={"xatol": 1e-10},
    )
    candidate, value = float(result.x), float(result.fun)
    base = float(objective(center))
    if base <= value:
        return center, base
    return candidate, value


def phase_scan(
    plant: PlantModel,
    comp: Compensator,
    mu: float,
    phi_grid,
) -> PhaseScan:
    """
    s = 0 power ratio as the feedback phase is scanned.

    The grid extrema are refined by a bounded scalar search within one grid
    step (the ratio is 2pi-periodic, so refinement may cross 0 or 2pi).

    Args:
        plant: Plant rates.
        comp: Compensator.
        mu: Mode-matching factor.
        phi_grid: Strictly increasing phases within [0, 2pi].

    Returns:
        PhaseScan with the ratio trace, minimum (negative feedback) and
        maximum (positive feedback) coordinates.
    """
    phases = validate_phase_grid(phi_grid)
    ratios = np.asarray(ratio_at_zero(plant, comp, mu, phases), dtype=float)
    step = float(np.min(np.diff(phases)))

    i_min = int(np.argmin(ratios))
    i_max = int(np.argmax(ratios))
    phi_min, value_min = _refine_extremum(
        lambda p: float(ratio_at_zero(plant, comp, mu, p)), float(phases[i_min]), step
    )
    phi_max, neg_max = _refine_extremum(
        lambda p: -float(ratio_at_zero(plant, comp, mu, p)), float(phases[i_max]), step
    )

    logger.debug(
        "Phase scan: min %.6g at %.6f rad, max %.6g at %.6f rad",
        value_min,
        phi_min,
        -neg_max,
        phi_max,
    )
    return PhaseScan(
        phi=phases.tolist(),
        ratio=ratios.tolist(),
        phi_min=normalize_phase(phi_min),
        ratio_min=max(value_min, 0.0),
        phi_max=normalize_phase(phi_max),
        ratio_max=max(-neg_max, 0.0),
    )
