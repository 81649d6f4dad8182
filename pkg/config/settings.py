"""
Application settings using pydantic-settings.

Numerical tolerances, search limits and output defaults are loaded from
environment variables (prefix ``COHERENT_FLOW_``) or a .env file.
Provides type validation and sensible defaults.
"""

from functools import lru_cache
from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application configuration loaded from environment."""

    model_config = SettingsConfigDict(
        env_prefix="COHERENT_FLOW_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # === Output ===
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="INFO",
        description="Log level used by the command-line front end",
    )
    output_dir: Path = Field(
        default=Path("./runs"),
        description="Default directory for traces, results and manifests",
    )

    # === Transfer-function evaluation ===
    pole_tolerance: float = Field(
        default=1e-12,
        gt=0.0,
        description="Relative distance to a pole treated as evaluation at the pole",
    )
    loop_singularity_tolerance: float = Field(
        default=1e-9,
        gt=0.0,
        description="|1 - L| below this raises AlgebraicLoopError",
    )

    # === Synthesis ===
    eta_K_max: float = Field(
        default=4.0,
        gt=0.0,
        description="Upper end of the compensator gain search domain",
    )
    gain_tolerance: float = Field(
        default=1e-6,
        gt=0.0,
        description="Absolute eta_K tolerance of the bracketed scalar search",
    )
    phase_refine_iterations: int = Field(
        default=20,
        ge=1,
        le=200,
        description="Maximum coordinate-refinement passes over (eta_K, phi)",
    )
    band_min_points: int = Field(
        default=512,
        ge=512,
        description="Initial grid density of the broadband metric",
    )
    band_max_points: int = Field(
        default=65536,
        ge=512,
        description="Grid density ceiling of the broadband refinement",
    )
    band_tolerance: float = Field(
        default=1e-6,
        gt=0.0,
        description="Successive-sup convergence tolerance of the broadband metric",
    )

    # === Estimation ===
    fit_max_nfev: int = Field(
        default=2000,
        ge=10,
        description="Maximum residual evaluations per local descent",
    )
    fit_xtol: float = Field(
        default=1e-9,
        gt=0.0,
        description="Step tolerance in scaled (unit-box) parameters",
    )
    fit_rank_rtol: float = Field(
        default=1e-6,
        gt=0.0,
        description="Relative singular-value cut used to flag rank deficiency",
    )

    # === Emulation ===
    lock_step: float = Field(
        default=1e-4,
        gt=0.0,
        description="Central-difference step (rad) of the lock error signal",
    )
    default_seed: int = Field(
        default=0,
        ge=0,
        description="Detector noise seed used when a config gives none",
    )

    # === Consistency report ===
    gamma_c_tolerance: float = Field(
        default=0.1,
        gt=0.0,
        description="Allowed |gamma_c(fit) - gamma_c(measured)| in MHz",
    )
    coupler_tolerance: float = Field(
        default=0.15,
        gt=0.0,
        description="Allowed relative deviation of fitted coupler rates",
    )
    mu_tolerance: float = Field(
        default=0.02,
        ge=0.0,
        description="Allowed excess of fitted mu over the measured bound",
    )


@lru_cache
def get_settings() -> Settings:
    """
    Get cached application settings.

    Returns:
        Settings: Application configuration instance.

    Example:
        >>> settings = get_settings()
        >>> settings.eta_K_max
        4.0
    """
    return Settings()
