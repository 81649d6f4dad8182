"""
Parameter estimation from parametric (max vs min) gain-sweep data.

At s = 0 every loop quantity is real, so the power ratio is a Moebius
function of cos(phi) and its extremes over the feedback phase sit exactly at
phi = 0 and phi = pi. Each measured gain therefore yields one predicted
(max, min) pair without any phase search.

The fit is a multi-start bounded least-squares descent (trust-region
reflective) in unit-box coordinates, with a fixed start grid so results are
deterministic. Residuals are either plain differences or divided by the
observation, the latter matching multiplicative detector noise.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from pydantic import ValidationError
from scipy.optimize import least_squares

from config import get_settings
from config.logging import get_logger
from src.models.cavity import CompensatorModel, PlantModel, RingCavityGeometry
from src.models.estimation import (
    FIT_PARAMETERS,
    ConsistencyCheck,
    ConsistencyReport,
    FitBounds,
    FitParameters,
    FitResult,
    FitWeighting,
    Interval,
    MeasuredValues,
    ParametricDataset,
)
from src.physics.cavity import coupler_rate_from_geometry
from src.physics.loop import loop_terms, ratio_from_terms
from src.utils.decorators import log_execution_time
from src.utils.exceptions import (
    ConfigurationError,
    FitConvergenceError,
    InsufficientDataError,
    NumericalError,
)

logger = get_logger(__name__)

BRANCH_PHASES = np.array([math.pi, 0.0])
START_GRID = (1.0 / 6.0, 0.5, 5.0 / 6.0)
INVALID_RESIDUAL = 1e3
MIN_POINTS = 4
RELATIVE_FLOOR = 1e-9


def _predict_branches(
    plant: PlantModel,
    eta_gamma: float,
    mu: float,
    eta_K: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (ratio_max, ratio_min) over an array of gains."""
    comp = CompensatorModel.model_construct(eta_K=1.0, eta_gamma=eta_gamma, plant_ref=plant)
    gains = np.asarray(eta_K, dtype=float)[:, None]
    terms = loop_terms(plant, comp, mu, BRANCH_PHASES[None, :], 0.0, eta_K=gains)
    ratios = ratio_from_terms(terms, mu)
    return ratios.max(axis=1), ratios.min(axis=1)


def predict_parametric_point(
    plant: PlantModel,
    eta_gamma: float,
    mu: float,
    eta_K: float,
) -> tuple[float, float]:
    """
    Predicted s = 0 power ratios under positive and negative feedback.

    Args:
        plant: Plant rates.
        eta_gamma: Controller decay-rate deviation (MHz).
        mu: Mode-matching factor.
        eta_K: Gain factor.

    Returns:
        (ratio_max, ratio_min), the phi = pi and phi = 0 branches.

    Example:
        >>> predict_parametric_point(reference_plant(), -0.664, 0.84, 0.0)
        (1.0, 1.0)
    """
    if eta_K < 0.0:
        raise ConfigurationError(f"eta_K must be nonnegative, got {eta_K}")
    high, low = _predict_branches(plant, eta_gamma, mu, np.array([eta_K]))
    return float(high[0]), float(low[0])


def _dataset_arrays(data: ParametricDataset) -> tuple[np.ndarray, np.ndarray]:
    frame = data.to_frame()
    observed = np.concatenate([frame["ratio_max"].to_numpy(), frame["ratio_min"].to_numpy()])
    return frame["eta_K"].to_numpy(dtype=float), observed


def _residual_weights(observed: np.ndarray, weighting: FitWeighting) -> np.ndarray:
    """Per-coordinate residual scale; 1 / observed matches multiplicative noise."""
    if weighting is FitWeighting.RELATIVE:
        return 1.0 / np.maximum(np.abs(observed), RELATIVE_FLOOR)
    return np.ones_like(observed)


def _residual_vector(
    gamma_p: float,
    params: dict[str, float],
    eta_K: np.ndarray,
    observed: np.ndarray,
    weights: np.ndarray,
) -> np.ndarray:
    """Weighted predicted minus observed, max branch then min branch."""
    k1, k4 = params["k1"], params["k4"]
    if 2.0 * (k1 + k4) >= gamma_p or min(k1, k4) < 0.0:
        raise ConfigurationError("coupler rates leave no positive ideal pole")
    plant = PlantModel.model_construct(gamma_p=gamma_p, k1=k1, k4=k4)
    high, low = _predict_branches(plant, params["eta_gamma"], params["mu"], eta_K)
    return (np.concatenate([high, low]) - observed) * weights


def parametric_residual(
    data: ParametricDataset,
    params: FitParameters,
    weighting: FitWeighting = FitWeighting.ABSOLUTE,
) -> np.ndarray:
    """
    Residual vector of a parameter set against a dataset.

    Args:
        data: Parametric dataset (gamma_p held at gamma_p_fixed).
        params: Candidate parameters.
        weighting: ABSOLUTE for predicted minus observed, RELATIVE to divide
            each coordinate by its observed value.

    Returns:
        Array of length 2n: ratio_max residuals, then ratio_min.
    """
    eta_K, observed = _dataset_arrays(data)
    weights = _residual_weights(observed, weighting)
    return _residual_vector(data.gamma_p_fixed, params.model_dump(), eta_K, observed, weights)


@dataclass(frozen=True)
class _ParameterSpace:
    """Map between unit-box coordinates and physical parameters."""

    names: tuple[str, ...]
    low: np.ndarray
    high: np.ndarray
    fixed: dict[str, float]
    symmetric: bool

    @classmethod
    def build(cls, bounds: FitBounds, symmetric: bool) -> "_ParameterSpace":
        intervals: dict[str, Interval] = {
            "eta_gamma": bounds.eta_gamma,
            "mu": bounds.mu,
        }
        if symmetric:
            low = max(bounds.k1.low, bounds.k4.low)
            high = min(bounds.k1.high, bounds.k4.high)
            if high < low:
                raise ConfigurationError(
                    "k1 and k4 bounds do not overlap; symmetric coupler fit impossible",
                    {"k1": bounds.k1.model_dump(), "k4": bounds.k4.model_dump()},
                )
            intervals["k"] = Interval(low=low, high=high)
        else:
            intervals["k1"] = bounds.k1
            intervals["k4"] = bounds.k4

        free = {name: iv for name, iv in intervals.items() if iv.high > iv.low}
        fixed = {name: iv.low for name, iv in intervals.items() if iv.high == iv.low}
        return cls(
            names=tuple(free),
            low=np.array([iv.low for iv in free.values()]),
            high=np.array([iv.high for iv in free.values()]),
            fixed=fixed,
            symmetric=symmetric,
        )

    @property
    def span(self) -> np.ndarray:
        return self.high - self.low

    def physical(self, x: np.ndarray) -> dict[str, float]:
        values = dict(self.fixed)
        values.update(zip(self.names, (self.low + np.asarray(x) * self.span).tolist()))
        if self.symmetric:
            values["k1"] = values["k4"] = values.pop("k")
        return values

    def unit(self, params: FitParameters) -> np.ndarray:
        source = params.model_dump()
        if self.symmetric:
            source["k"] = 0.5 * (params.k1 + params.k4)
        x = (np.array([source[name] for name in self.names]) - self.low) / self.span
        return np.clip(x, 0.0, 1.0)


def _standard_errors(
    space: _ParameterSpace, jac: np.ndarray, cost: float
) -> tuple[dict[str, float], int]:
    """Per-parameter standard-error proxy and numerical Jacobian rank."""
    rows, cols = jac.shape
    singular = np.linalg.svd(jac, compute_uv=False)
    if singular.size == 0 or singular[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(singular > get_settings().fit_rank_rtol * singular[0]))

    sigma_sq = 2.0 * cost / max(rows - cols, 1)
    covariance = np.linalg.pinv(jac.T @ jac) * sigma_sq
    unit_errors = np.sqrt(np.clip(np.diag(covariance), 0.0, None))
    errors = dict.fromkeys(FIT_PARAMETERS, 0.0)
    for name, value in zip(space.names, (unit_errors * space.span).tolist()):
        if name == "k":
            errors["k1"] = errors["k4"] = value
        else:
            errors[name] = value
    return errors, rank


@log_execution_time
def fit_parameters(
    data: ParametricDataset,
    bounds: FitBounds | None = None,
    initial_guess: FitParameters | None = None,
    symmetric_couplers: bool = False,
    weighting: FitWeighting = FitWeighting.ABSOLUTE,
) -> FitResult:
    """
    Least-squares fit of (eta_gamma, mu, k1, k4) to a parametric dataset.

    Every combination of {1/6, 1/2, 5/6} across the free parameter ranges
    seeds one bounded descent (81 starts unconstrained, 27 with
    symmetric_couplers); an initial guess adds one more. The lowest cost
    wins, ties going to the lexicographically smallest parameter vector.
    A bound with low == high holds that parameter fixed.

    Args:
        data: Dataset with gamma_p_fixed.
        bounds: Search intervals (default: FitBounds.default_for(gamma_p)).
        initial_guess: Optional additional starting point.
        symmetric_couplers: Constrain k1 = k4.
        weighting: ABSOLUTE minimizes the plain sum of squares; RELATIVE
            divides each residual by its observation, the maximum-likelihood
            scaling under multiplicative detector noise.

    Returns:
        FitResult with RMS residual, standard-error proxy and diagnostics.
        The s = 0 data fix only three combinations of the four parameters,
        so unconstrained fits report rank_deficient.

    Raises:
        InsufficientDataError: With fewer than four points.
        ConfigurationError: If symmetric bounds for k1 and k4 do not overlap.
        FitConvergenceError: If every descent hit the evaluation limit.
    """
    if data.size < MIN_POINTS:
        raise InsufficientDataError(
            f"Fitting needs at least {MIN_POINTS} points, got {data.size}",
            {"points": data.size},
        )

    settings = get_settings()
    gamma_p = data.gamma_p_fixed
    bounds = bounds or FitBounds.default_for(gamma_p)
    space = _ParameterSpace.build(bounds, symmetric_couplers)
    if not space.names:
        raise ConfigurationError("Every fit parameter is fixed by its bounds", space.fixed)
    eta_K, observed = _dataset_arrays(data)
    weights = _residual_weights(observed, weighting)

    def residuals(x: np.ndarray) -> np.ndarray:
        try:
            r = _residual_vector(gamma_p, space.physical(x), eta_K, observed, weights)
        except (ConfigurationError, NumericalError, ValidationError):
            return np.full(observed.size, INVALID_RESIDUAL)
        if not np.all(np.isfinite(r)):
            return np.full(observed.size, INVALID_RESIDUAL)
        return r

    starts = [np.array(point) for point in itertools.product(START_GRID, repeat=len(space.names))]
    warnings: list[str] = []
    if initial_guess is not None:
        for name in FIT_PARAMETERS:
            value = getattr(initial_guess, name)
            if not getattr(bounds, name).contains(value):
                warnings.append(f"initial guess {name}={value:.6g} lies outside its bounds")
        starts.insert(0, space.unit(initial_guess))

    logger.info(
        "Fitting %d points: free=%s fixed=%s starts=%d",
        data.size,
        ",".join(space.names),
        space.fixed,
        len(starts),
    )

    outcomes = []
    for index, x0 in enumerate(starts):
        outcome = least_squares(
            residuals,
            x0,
            jac="3-point",
            bounds=(0.0, 1.0),
            method="trf",
            xtol=settings.fit_xtol,
            ftol=1e-14,
            gtol=1e-14,
            max_nfev=settings.fit_max_nfev,
        )
        if outcome.status == 0:
            logger.warning(
                "Descent %d stopped at the evaluation limit (cost %.3e)", index, outcome.cost
            )
        logger.debug("Descent %d: status=%d cost=%.3e", index, outcome.status, outcome.cost)
        outcomes.append(outcome)

    lowest = min(o.cost for o in outcomes)
    tied = [o for o in outcomes if o.cost <= lowest * (1.0 + 1e-9) + 1e-300]
    best = min(tied, key=lambda o: tuple(space.physical(o.x)[n] for n in FIT_PARAMETERS))
    values = space.physical(best.x)

    rms = math.sqrt(2.0 * best.cost / observed.size)
    errors, rank = _standard_errors(space, best.jac, best.cost)
    if rank < len(space.names):
        warnings.append(
            f"Jacobian rank {rank} is below the {len(space.names)} free parameters; "
            "the data do not determine every parameter"
        )
    for name, x in zip(space.names, best.x):
        if x <= 1e-6 or x >= 1.0 - 1e-6:
            side = "lower" if x <= 1e-6 else "upper"
            warnings.append(f"{name} finished at its {side} bound")
    converged = best.status != 0
    if not converged:
        warnings.append("best descent stopped at the evaluation limit")
    for message in warnings:
        logger.warning("Fit: %s", message)

    result = FitResult(
        eta_gamma=values["eta_gamma"],
        mu=min(max(values["mu"], 0.0), 1.0),
        k1=values["k1"],
        k4=values["k4"],
        residual=rms,
        covariance_proxy=errors,
        gamma_p=gamma_p,
        symmetric_couplers=symmetric_couplers,
        weighting=weighting,
        rank_deficient=rank < len(space.names),
        warnings=warnings,
        converged=converged,
        starts=len(starts),
    )

    if all(o.status == 0 for o in outcomes):
        raise FitConvergenceError(
            f"All {len(outcomes)} descents hit the {settings.fit_max_nfev}-evaluation limit",
            best_so_far=result,
        )

    logger.info(
        "Fit: eta_gamma=%.6g mu=%.6g k1=%.6g k4=%.6g rms=%.3e",
        result.eta_gamma,
        result.mu,
        result.k1,
        result.k4,
        result.residual,
    )
    return result


def consistency_report(
    fit: FitResult,
    measured: MeasuredValues,
    gamma_c_tolerance: float | None = None,
    coupler_tolerance: float | None = None,
    mu_tolerance: float | None = None,
) -> ConsistencyReport:
    """
    Cross-check a fit against independent measurements.

    Checks:
        gamma_c: gamma_p - 2(k1 + k4) + eta_gamma against the measured
            controller decay rate, absolute tolerance in MHz.
        coupler_rates: fitted k1 and k4 against the rate of the witness
            coupler transmission at the plant length, relative tolerance.
        mu_bound: fitted mu at most the measured bound plus tolerance.

    Args:
        fit: Fit to check; gamma_p is taken from the measurement.
        measured: Independent measurements.
        gamma_c_tolerance: Override of the settings tolerance (MHz).
        coupler_tolerance: Override (relative).
        mu_tolerance: Override (absolute).

    Returns:
        ConsistencyReport with one entry per check.
    """
    settings = get_settings()
    if gamma_c_tolerance is None:
        gamma_c_tolerance = settings.gamma_c_tolerance
    if coupler_tolerance is None:
        coupler_tolerance = settings.coupler_tolerance
    if mu_tolerance is None:
        mu_tolerance = settings.mu_tolerance

    checks = []

    gamma_c = measured.gamma_p - 2.0 * (fit.k1 + fit.k4) + fit.eta_gamma
    passed = abs(gamma_c - measured.gamma_c) <= gamma_c_tolerance
    checks.append(
        ConsistencyCheck(
            name="gamma_c",
            passed=passed,
            observed=gamma_c,
            expected=measured.gamma_c,
            tolerance=gamma_c_tolerance,
            message=(
                f"fitted controller decay {gamma_c:.4f} MHz vs measured "
                f"{measured.gamma_c:.4f} MHz (+/- {gamma_c_tolerance} MHz)"
            ),
        )
    )

    witness = RingCavityGeometry.model_construct(
        t_sq=(measured.witness_t_sq, 0.0, 0.0, 0.0),
        l_sq=0.0,
        length_m=measured.length_m,
    )
    expected_k = coupler_rate_from_geometry(witness, 0)
    worst_k = max((fit.k1, fit.k4), key=lambda k: abs(k - expected_k))
    if expected_k > 0.0:
        deviation = abs(worst_k - expected_k) / expected_k
    else:
        deviation = 0.0 if worst_k == 0.0 else math.inf
    checks.append(
        ConsistencyCheck(
            name="coupler_rates",
            passed=deviation <= coupler_tolerance,
            observed=worst_k,
            expected=expected_k,
            tolerance=coupler_tolerance,
            message=(
                f"fitted k1={fit.k1:.4f}, k4={fit.k4:.4f} MHz vs witness rate "
                f"{expected_k:.4f} MHz ({deviation:.1%} off, allowed {coupler_tolerance:.0%})"
            ),
        )
    )

    checks.append(
        ConsistencyCheck(
            name="mu_bound",
            passed=fit.mu <= measured.mu_bound + mu_tolerance,
            observed=fit.mu,
            expected=measured.mu_bound,
            tolerance=mu_tolerance,
            message=(
                f"fitted mu {fit.mu:.4f} vs measured bound "
                f"{measured.mu_bound:.4f} (+{mu_tolerance})"
            ),
        )
    )

    report = ConsistencyReport(checks=checks)
    logger.info(
        "Consistency: %s",
        ", ".join(f"{c.name}={'pass' if c.passed else 'FAIL'}" for c in checks),
    )
    return report
