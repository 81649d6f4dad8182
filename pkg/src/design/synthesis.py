"""
Dynamic compensator synthesis.

Builds the ideal compensator, optimizes the gain factor eta_K and feedback
phase for given imperfections, and computes broadband rejection metrics.
The gain search is a bounded golden-section/parabolic scalar search
(scipy's bounded Brent) per candidate phase, followed by coordinate
refinement over (eta_K, phi).
"""

import math
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import minimize_scalar

from config import get_settings
from config.logging import get_logger
from src.models.cavity import CompensatorModel, PlantModel, ProportionalCompensator
from src.models.loop import LoopEnvironment
from src.models.synthesis import CompensatorComparison, GainTarget, SynthesisResult
from src.physics.cavity import Compensator, compensator_tf
from src.physics.loop import power_ratio, ratio_at_zero, rejection_db
from src.utils.decorators import log_execution_time
from src.utils.exceptions import ConfigurationError, InfeasibleDesignError, InsufficientDataError
from src.utils.validators import normalize_phase

logger = get_logger(__name__)

PHASE_CANDIDATES = (0.0, math.pi)


def ideal_compensator(plant: PlantModel) -> CompensatorModel:
    """
    Compensator that nulls the closed loop for every s at perfect mode matching.

    Args:
        plant: Plant rates.

    Returns:
        CompensatorModel with eta_K = 1 and eta_gamma = 0, i.e. pole
        gamma_p - 2(k1 + k4).

    Raises:
        InfeasibleDesignError: If 2(k1 + k4) >= gamma_p.
    """
    pole = plant.gamma_p - 2.0 * (plant.k1 + plant.k4)
    if pole <= 0.0:
        raise InfeasibleDesignError(
            f"Ideal compensator pole {pole:.6g} MHz is not positive",
            {"gamma_p": plant.gamma_p, "k1": plant.k1, "k4": plant.k4},
        )
    return CompensatorModel(eta_K=1.0, eta_gamma=0.0, plant_ref=plant)


def _band_grid_values(
    plant: PlantModel,
    comp: Compensator,
    env: LoopEnvironment,
    band_edge: float,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Power ratio on a symmetric band grid refined until the sup settles.

    Nested grids (n -> 2n - 1) keep every previous point, so successive
    sups are non-decreasing.
    """
    if not band_edge > 0.0:
        raise InsufficientDataError(f"Band edge must be positive, got {band_edge}")

    settings = get_settings()
    points = settings.band_min_points + 1
    grid = np.linspace(-band_edge, band_edge, points)
    values = np.asarray(power_ratio(plant, comp, env, 1j * grid), dtype=float)
    previous = float(values.max())

    while 2 * points - 1 <= settings.band_max_points:
        points = 2 * points - 1
        grid = np.linspace(-band_edge, band_edge, points)
        values = np.asarray(power_ratio(plant, comp, env, 1j * grid), dtype=float)
        current = float(values.max())
        if abs(current - previous) < settings.band_tolerance:
            break
        previous = current
    else:
        logger.debug("Band refinement stopped at the %d-point ceiling", points)

    return grid, values


def broadband_metric(
    plant: PlantModel,
    comp: Compensator,
    env: LoopEnvironment,
    band_edge: float,
) -> float:
    """
    Worst-case power ratio over |delta| <= band_edge.

    Args:
        plant: Plant rates.
        comp: Compensator.
        env: Mode matching and feedback phase.
        band_edge: Half-width of the band (MHz).

    Returns:
        Supremum of the ratio on a grid of at least 512 points refined until
        successive sups differ by less than the band tolerance.
    """
    _, values = _band_grid_values(plant, comp, env, band_edge)
    return float(values.max())


def broadband_mean(
    plant: PlantModel,
    comp: Compensator,
    env: LoopEnvironment,
    band_edge: float,
) -> float:
    """Mean power ratio over |delta| <= band_edge (trapezoidal)."""
    grid, values = _band_grid_values(plant, comp, env, band_edge)
    return float(trapezoid(values, grid) / (2.0 * band_edge))


def _objective(
    plant: PlantModel,
    eta_gamma: float,
    mu: float,
    target: GainTarget,
    band_edge: float | None,
) -> Callable[[float, float], float]:
    """Objective f(eta_K, phi) for the requested target."""
    template = CompensatorModel(eta_K=1.0, eta_gamma=eta_gamma, plant_ref=plant)
    base_env = LoopEnvironment(mu=mu)

    def at_zero(eta_K: float, phi: float) -> float:
        comp = template.model_copy(update={"eta_K": max(eta_K, 0.0)})
        return float(ratio_at_zero(plant, comp, mu, phi))

    def band(eta_K: float, phi: float) -> float:
        comp = template.model_copy(update={"eta_K": max(eta_K, 0.0)})
        return broadband_metric(plant, comp, base_env.with_phase(phi), band_edge)

    return band if target is GainTarget.BAND else at_zero


def _search_gain(
    objective: Callable[[float, float], float],
    phi: float,
    eta_K_max: float,
    tolerance: float,
) -> tuple[float, float]:
    """Bounded scalar search over eta_K at fixed phase, endpoints included."""
    result = minimize_scalar(
        lambda g: objective(g, phi),
        bounds=(0.0, eta_K_max),
        method="bounded",
        options={"xatol": tolerance},
    )
    best = (float(result.x), float(result.fun))
    for edge in (0.0, eta_K_max):
        value = objective(edge, phi)
        if value < best[1]:
            best = (edge, value)
    return best


def _search_phase(
    objective: Callable[[float, float], float],
    eta_K: float,
    phi: float,
    tolerance: float,
) -> tuple[float, float]:
    """Bounded scalar search over phi within a quarter turn of the current phase."""
    result = minimize_scalar(
        lambda p: objective(eta_K, p),
        bounds=(phi - math.pi / 2.0, phi + math.pi / 2.0),
        method="bounded",
        options={"xatol": tolerance},
    )
    return float(result.x), float(result.fun)


def _moved(eta_K: float, phi: float, new_eta_K: float, new_phi: float, tolerance: float) -> bool:
    """True when a refinement step changed the held gain or phase."""
    turn = abs(new_phi - phi) % (2.0 * math.pi)
    return abs(new_eta_K - eta_K) > tolerance or min(turn, 2.0 * math.pi - turn) > tolerance


@log_execution_time
def optimize_gain(
    plant: PlantModel,
    eta_gamma: float,
    mu: float,
    target: GainTarget = GainTarget.AT_ZERO,
    band_edge: float | None = None,
    eta_K_max: float | None = None,
) -> SynthesisResult:
    """
    Optimize compensator gain and feedback phase for given imperfections.

    Args:
        plant: Plant rates.
        eta_gamma: Controller decay-rate deviation (MHz).
        mu: Mode-matching factor in [0, 1].
        target: AT_ZERO minimizes the s = 0 ratio, BAND the worst case over
            |delta| <= band_edge.
        band_edge: Band half-width (MHz); required for BAND, and when given
            the band metric is reported for either target.
        eta_K_max: Upper end of the gain search (default from settings).

    Returns:
        SynthesisResult at the optimum.

    Raises:
        ConfigurationError: If mu is outside [0, 1].
        InsufficientDataError: If BAND is requested without a positive band edge.
        InfeasibleDesignError: If the plant admits no positive ideal pole.

    Example:
        >>> result = optimize_gain(reference_plant(), 9.3 / 14, 0.84)
        >>> round(result.rejection_db, 1)
        7.4
    """
    settings = get_settings()
    if not 0.0 <= mu <= 1.0:
        raise ConfigurationError(f"mu must lie in [0, 1], got {mu}")
    if target is GainTarget.BAND and (band_edge is None or band_edge <= 0.0):
        raise InsufficientDataError("BAND target needs a positive band edge")
    ideal_compensator(plant)
    if plant.gamma_p - 2.0 * (plant.k1 + plant.k4) + eta_gamma <= 0.0:
        logger.warning("Compensator pole is not positive for eta_gamma=%.6g", eta_gamma)

    eta_K_max = eta_K_max or settings.eta_K_max
    tolerance = settings.gain_tolerance
    objective = _objective(plant, eta_gamma, mu, target, band_edge)

    logger.info(
        "Optimizing gain: target=%s eta_gamma=%.6g mu=%.4g eta_K_max=%.3g",
        target.value,
        eta_gamma,
        mu,
        eta_K_max,
    )

    if eta_gamma == 0.0 and mu == 1.0 and eta_K_max >= 1.0:
        # the ideal compensator nulls the loop exactly; skip the search
        comp = ideal_compensator(plant)
        band_value = None
        if band_edge is not None:
            band_value = broadband_metric(plant, comp, LoopEnvironment(mu=1.0), band_edge)
        logger.info("Ideal conditions: eta_K=1, phi=0, exact nulling")
        return SynthesisResult(
            eta_K_opt=1.0,
            phi_opt=0.0,
            ratio_at_zero=0.0,
            rejection_db=math.inf,
            band_metric=band_value,
            target=target,
            band_edge=band_edge,
        )

    candidates = []
    for phi in PHASE_CANDIDATES:
        eta_K, value = _search_gain(objective, phi, eta_K_max, tolerance)
        candidates.append((value, eta_K, phi))
    value, eta_K, phi = min(candidates)

    for iteration in range(settings.phase_refine_iterations):
        if eta_K == 0.0:
            break  # phase is irrelevant without feedback
        held_eta_K, held_phi = eta_K, phi
        new_phi, phi_value = _search_phase(objective, eta_K, phi, tolerance)
        if phi_value < value:
            phi, value = new_phi, phi_value
        new_eta_K, gain_value = _search_gain(objective, phi, eta_K_max, tolerance)
        if gain_value < value:
            eta_K, value = new_eta_K, gain_value
        logger.debug("Refinement %d: eta_K=%.8f phi=%.8f value=%.3e", iteration, eta_K, phi, value)
        if not _moved(held_eta_K, held_phi, eta_K, phi, tolerance):
            break

    comp = CompensatorModel(eta_K=eta_K, eta_gamma=eta_gamma, plant_ref=plant)
    phi = normalize_phase(phi)
    ratio = float(ratio_at_zero(plant, comp, mu, phi))
    band_value = None
    if band_edge is not None:
        band_value = broadband_metric(plant, comp, LoopEnvironment(mu=mu, phi=phi), band_edge)

    result = SynthesisResult(
        eta_K_opt=eta_K,
        phi_opt=phi,
        ratio_at_zero=ratio,
        rejection_db=rejection_db(ratio),
        band_metric=band_value,
        target=target,
        band_edge=band_edge,
    )
    logger.info(
        "Optimum: eta_K=%.6f phi=%.6f ratio=%.6g (%.3f dB)",
        result.eta_K_opt,
        result.phi_opt,
        result.ratio_at_zero,
        result.rejection_db,
    )
    return result


def compare_with_proportional(
    plant: PlantModel,
    eta_gamma: float,
    mu: float,
    band_edge: float,
) -> CompensatorComparison:
    """
    Band performance of the optimized dynamic compensator against a static gain.

    The static gain equals |K_uy(0)| of the optimized dynamic compensator,
    so both agree at s = 0 and differ only away from resonance.

    Args:
        plant: Plant rates (k1 k4 > 0).
        eta_gamma: Controller decay-rate deviation (MHz).
        mu: Mode-matching factor.
        band_edge: Band half-width (MHz).

    Returns:
        CompensatorComparison with both worst-case band ratios.
    """
    dynamic = optimize_gain(plant, eta_gamma, mu, GainTarget.AT_ZERO, band_edge=band_edge)
    comp = CompensatorModel(eta_K=dynamic.eta_K_opt, eta_gamma=eta_gamma, plant_ref=plant)
    static = ProportionalCompensator(gain=abs(compensator_tf(comp, 0.0)))
    env = LoopEnvironment(mu=mu, phi=dynamic.phi_opt)

    return CompensatorComparison(
        band_edge=band_edge,
        dynamic=dynamic,
        proportional_gain=static.gain,
        dynamic_band_metric=broadband_metric(plant, comp, env, band_edge),
        proportional_band_metric=broadband_metric(plant, static, env, band_edge),
        dynamic_band_mean=broadband_mean(plant, comp, env, band_edge),
        proportional_band_mean=broadband_mean(plant, static, env, band_edge),
    )
