"""
Pydantic models for resonator descriptions.

Physical ring-cavity geometry, rate-level plant parameters and the
compensator families evaluated by the loop algebra. Rates and frequencies
are in MHz throughout.
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator
from scipy.constants import c as SPEED_OF_LIGHT

MHZ = 1e6


class Channel(str, Enum):
    """Plant transfer-function channels (output, input)."""

    ZW = "zw"
    ZU = "zu"
    YW = "yw"
    YU = "yu"


class RingCavityGeometry(BaseModel):
    """Mirror transmissions, lumped loss and round-trip length of a ring resonator."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "t_sq": [0.002, 0.0250, 0.0249, 0.002],
                "l_sq": 0.001,
                "length_m": 0.141,
            }
        },
    )

    t_sq: tuple[float, float, float, float] = Field(
        description="Per-mirror power transmission coefficients, each in [0, 1]"
    )
    l_sq: float = Field(ge=0.0, description="Lumped intracavity power loss")
    length_m: float = Field(gt=0.0, description="Round-trip path length in meters")

    @model_validator(mode="after")
    def _check_losses(self) -> "RingCavityGeometry":
        for i, t in enumerate(self.t_sq):
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"t_sq[{i}] must lie in [0, 1], got {t}")
        if sum(self.t_sq) + self.l_sq <= 0.0:
            raise ValueError("t_sq sum plus l_sq must be positive (zero-decay cavity)")
        return self

    @computed_field
    @property
    def total_loss(self) -> float:
        """Sum of mirror transmissions and lumped loss."""
        return sum(self.t_sq) + self.l_sq

    @computed_field
    @property
    def free_spectral_range(self) -> float:
        """Longitudinal mode spacing c/L in MHz."""
        return SPEED_OF_LIGHT / self.length_m / MHZ


class PlantModel(BaseModel):
    """
    Rate-level plant resonator.

    gamma_p is the total decay rate; k1 and k4 are the partial rates of the
    input and output couplers. The ideal compensator pole
    gamma_p - 2(k1 + k4) must be positive.
    """

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"example": {"gamma_p": 9.3, "k1": 0.3384, "k4": 0.3384}},
    )

    gamma_p: float = Field(gt=0.0, description="Total plant decay rate (MHz)")
    k1: float = Field(ge=0.0, description="Input-coupler partial rate (MHz)")
    k4: float = Field(ge=0.0, description="Output-coupler partial rate (MHz)")

    @model_validator(mode="after")
    def _check_ideal_pole(self) -> "PlantModel":
        if 2.0 * (self.k1 + self.k4) >= self.gamma_p:
            raise ValueError(
                f"2*(k1 + k4) = {2.0 * (self.k1 + self.k4):.6g} must be below "
                f"gamma_p = {self.gamma_p:.6g}"
            )
        return self

    @computed_field
    @property
    def ideal_compensator_pole(self) -> float:
        """Controller decay rate gamma_p - 2(k1 + k4) that nulls the loop."""
        return self.gamma_p - 2.0 * (self.k1 + self.k4)

    @classmethod
    def from_geometry(
        cls,
        geometry: RingCavityGeometry,
        input_mirror: int = 0,
        output_mirror: int = 3,
    ) -> "PlantModel":
        """
        Build a plant from its physical description.

        Args:
            geometry: Ring cavity geometry.
            input_mirror: Index of the input coupler (w enters, y leaves).
            output_mirror: Index of the output coupler (u enters, z leaves).

        Returns:
            Validated PlantModel.
        """
        from src.physics.cavity import coupler_rate_from_geometry, decay_rate_from_geometry

        return cls(
            gamma_p=decay_rate_from_geometry(geometry),
            k1=coupler_rate_from_geometry(geometry, input_mirror),
            k4=coupler_rate_from_geometry(geometry, output_mirror),
        )


class CompensatorModel(BaseModel):
    """
    Dynamic compensator resonator.

    K_uy = 2 sqrt(eta_K) sqrt(k1 k4) / (s + gamma_p - 2(k1 + k4) + eta_gamma)
    with the rates taken from plant_ref. A non-positive pole is allowed so
    that unstable designs can be analysed; is_stable reports it.
    """

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "eta_K": 0.92,
                "eta_gamma": 0.664,
                "plant_ref": {"gamma_p": 9.3, "k1": 0.3384, "k4": 0.3384},
            }
        },
    )

    eta_K: float = Field(ge=0.0, description="Gain factor relative to the ideal compensator")
    eta_gamma: float = Field(description="Deviation of the controller decay rate (MHz)")
    plant_ref: PlantModel = Field(description="Plant whose rates appear in K_uy")

    @computed_field
    @property
    def pole(self) -> float:
        """Compensator decay rate gamma_p - 2(k1 + k4) + eta_gamma."""
        return self.plant_ref.ideal_compensator_pole + self.eta_gamma

    @computed_field
    @property
    def controller_decay_rate(self) -> float:
        """Equivalent controller decay rate gamma_c (MHz)."""
        return self.pole

    @computed_field
    @property
    def is_stable(self) -> bool:
        """True when the compensator pole lies in the left half-plane."""
        return self.pole > 0.0

    @classmethod
    def from_controller_decay(
        cls,
        plant: PlantModel,
        gamma_c: float,
        eta_K: float = 1.0,
    ) -> "CompensatorModel":
        """
        Build a compensator from a measured controller decay rate.

        Args:
            plant: Plant the compensator is designed for.
            gamma_c: Measured controller decay rate (MHz).
            eta_K: Gain factor.

        Returns:
            CompensatorModel with eta_gamma = gamma_c - (gamma_p - 2(k1 + k4)).
        """
        return cls(
            eta_K=eta_K,
            eta_gamma=gamma_c - plant.ideal_compensator_pole,
            plant_ref=plant,
        )


class ProportionalCompensator(BaseModel):
    """Frequency-independent (static) compensator with real gain magnitude."""

    model_config = ConfigDict(frozen=True)

    gain: float = Field(ge=0.0, description="Static K_uy magnitude")
