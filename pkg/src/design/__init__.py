"""
Compensator design for coherent-flow.

Exports:
    - Synthesis: ideal compensator, gain/phase optimization, band metrics
    - Estimation: parametric predictions, least-squares fit, consistency report
"""

from src.design.estimation import (
    consistency_report,
    fit_parameters,
    parametric_residual,
    predict_parametric_point,
)
from src.design.synthesis import (
    broadband_mean,
    broadband_metric,
    compare_with_proportional,
    ideal_compensator,
    optimize_gain,
)

__all__ = [
    # Synthesis
    "ideal_compensator",
    "optimize_gain",
    "broadband_metric",
    "broadband_mean",
    "compare_with_proportional",
    # Estimation
    "predict_parametric_point",
    "parametric_residual",
    "fit_parameters",
    "consistency_report",
]
