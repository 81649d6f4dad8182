"""
Parametric gain sweep: s = 0 power ratio under positive and negative
feedback for each compensator gain, as recorded from phase scans.
"""

import numpy as np

from config.logging import get_logger
from src.design.estimation import predict_parametric_point
from src.emulators.base import BaseEmulator, EmulationResponse, detector_noise, resolve_seed
from src.models.cavity import PlantModel
from src.models.emulation import EmulationConfig, Scenario
from src.models.estimation import ParametricDataset, ParametricPoint
from src.models.run import RunConfig
from src.utils.decorators import log_execution_time

logger = get_logger(__name__)


@log_execution_time
def emulate_parametric_dataset(
    plant: PlantModel,
    eta_gamma: float,
    mu: float,
    eta_K_values: list[float],
    cfg: EmulationConfig,
) -> ParametricDataset:
    """
    Generate a (eta_K, ratio_max, ratio_min) dataset.

    Each coordinate gets independent multiplicative detector noise; a pair
    whose noise inverts the order is stored sorted.

    Args:
        plant: Plant rates; gamma_p becomes the dataset's fixed decay rate.
        eta_gamma: Controller decay-rate deviation (MHz).
        mu: Mode-matching factor.
        eta_K_values: Gains to sweep.
        cfg: Seed and detector_noise.

    Returns:
        ParametricDataset.
    """
    rng = np.random.default_rng(resolve_seed(cfg))
    points = []
    for eta_K in eta_K_values:
        high, low = predict_parametric_point(plant, eta_gamma, mu, eta_K)
        noisy_high, noisy_low = np.array([high, low]) * detector_noise(rng, cfg.detector_noise, 2)
        points.append(
            ParametricPoint(
                eta_K=eta_K,
                ratio_max=max(noisy_high, noisy_low),
                ratio_min=min(noisy_high, noisy_low),
            )
        )
    return ParametricDataset(points=points, gamma_p_fixed=plant.gamma_p)


class ParametricEmulator(BaseEmulator):
    """Gain sweep producing a dataset for the fit command."""

    scenario = Scenario.PARAMETRIC

    def run(self, config: RunConfig) -> EmulationResponse:
        plant = config.plant.to_plant()
        comp = config.compensator.to_compensator(plant)
        dataset = emulate_parametric_dataset(
            plant, comp.eta_gamma, config.loop.mu, config.scan.eta_K_values, config.emulation
        )
        logger.info("Parametric sweep: %d gains", dataset.size)
        return EmulationResponse.success_response(
            self.scenario,
            {"parametric": dataset.to_frame()},
            seed=resolve_seed(config.emulation),
            gamma_p_fixed=dataset.gamma_p_fixed,
        )
