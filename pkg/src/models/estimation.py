"""
Pydantic models for parameter estimation.

Parametric (max vs min power ratio) datasets, fit bounds and results, and
the consistency report against independent measurements.
"""

from enum import Enum
from pathlib import Path

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from src.utils.exceptions import ConfigurationError, InsufficientDataError

FIT_PARAMETERS = ("eta_gamma", "mu", "k1", "k4")
DATASET_COLUMNS = ("eta_K", "ratio_max", "ratio_min")


class FitWeighting(str, Enum):
    """Residual scaling of the parametric fit."""

    ABSOLUTE = "absolute"  # predicted - observed
    RELATIVE = "relative"  # (predicted - observed) / observed


class ParametricPoint(BaseModel):
    """One s = 0 measurement under positive and negative feedback."""

    model_config = ConfigDict(frozen=True)

    eta_K: float = Field(ge=0.0, description="Compensator gain factor")
    ratio_max: float = Field(ge=0.0, description="Power ratio, positive feedback")
    ratio_min: float = Field(ge=0.0, description="Power ratio, negative feedback")

    @model_validator(mode="after")
    def _check_order(self) -> "ParametricPoint":
        if self.ratio_min > self.ratio_max:
            raise ValueError(
                f"ratio_min {self.ratio_min} exceeds ratio_max {self.ratio_max}"
            )
        return self


class ParametricDataset(BaseModel):
    """Parametric max/min dataset across a gain sweep."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "points": [{"eta_K": 0.5, "ratio_max": 2.31, "ratio_min": 0.27}],
                "gamma_p_fixed": 9.3,
            }
        },
    )

    points: list[ParametricPoint] = Field(description="Measured points")
    gamma_p_fixed: float = Field(gt=0.0, description="Independently measured plant decay rate")

    @model_validator(mode="after")
    def _check_gains(self) -> "ParametricDataset":
        positive = [p.eta_K for p in self.points if p.eta_K > 0.0]
        if len(set(positive)) != len(positive):
            raise ValueError("positive eta_K values must be distinct")
        return self

    @computed_field
    @property
    def size(self) -> int:
        """Number of points."""
        return len(self.points)

    def to_frame(self) -> pd.DataFrame:
        """Tabular form with columns eta_K, ratio_max, ratio_min."""
        return pd.DataFrame(
            [p.model_dump() for p in self.points], columns=list(DATASET_COLUMNS)
        )

    def to_csv(self, path: Path) -> Path:
        """Write the dataset as CSV and return the path."""
        self.to_frame().to_csv(path, index=False)
        return path

    @classmethod
    def from_csv(cls, path: Path, gamma_p_fixed: float) -> "ParametricDataset":
        """
        Read a dataset from CSV.

        Args:
            path: CSV file with columns eta_K, ratio_max, ratio_min.
            gamma_p_fixed: Plant decay rate held fixed during fitting.

        Returns:
            Validated dataset.

        Raises:
            InsufficientDataError: If the file holds no rows.
            ConfigurationError: If columns are missing.
        """
        try:
            frame = pd.read_csv(path)
        except pd.errors.EmptyDataError as e:
            raise InsufficientDataError(f"Dataset {path} is empty") from e
        missing = [col for col in DATASET_COLUMNS if col not in frame.columns]
        if missing:
            raise ConfigurationError(f"Dataset {path} lacks columns: {missing}")
        if frame.empty:
            raise InsufficientDataError(f"Dataset {path} has no rows")
        return cls(
            points=frame[list(DATASET_COLUMNS)].to_dict(orient="records"),
            gamma_p_fixed=gamma_p_fixed,
        )


class Interval(BaseModel):
    """Closed parameter interval."""

    model_config = ConfigDict(frozen=True)

    low: float
    high: float

    @model_validator(mode="after")
    def _check_order(self) -> "Interval":
        if self.high < self.low:
            raise ValueError(f"empty interval [{self.low}, {self.high}]")
        return self

    def contains(self, value: float) -> bool:
        """True when value lies in the interval."""
        return self.low <= value <= self.high


class FitBounds(BaseModel):
    """Search intervals for the fitted parameters."""

    model_config = ConfigDict(frozen=True)

    eta_gamma: Interval
    mu: Interval
    k1: Interval
    k4: Interval

    @model_validator(mode="after")
    def _check_physical(self) -> "FitBounds":
        if self.mu.low < 0.0 or self.mu.high > 1.0:
            raise ValueError("mu bounds must lie within [0, 1]")
        if self.k1.low < 0.0 or self.k4.low < 0.0:
            raise ValueError("coupler rate bounds must be nonnegative")
        return self

    @classmethod
    def default_for(cls, gamma_p: float) -> "FitBounds":
        """
        Default bounds scaled to the plant decay rate.

        Couplers stay below gamma_p / 8 each and |eta_gamma| below gamma_p / 4,
        so every in-bounds compensator pole is at least gamma_p / 4.
        """
        return cls(
            eta_gamma=Interval(low=-0.25 * gamma_p, high=0.25 * gamma_p),
            mu=Interval(low=0.5, high=1.0),
            k1=Interval(low=0.005 * gamma_p, high=0.125 * gamma_p),
            k4=Interval(low=0.005 * gamma_p, high=0.125 * gamma_p),
        )


class FitParameters(BaseModel):
    """A point in the fitted parameter space."""

    model_config = ConfigDict(frozen=True)

    eta_gamma: float
    mu: float = Field(ge=0.0, le=1.0)
    k1: float = Field(ge=0.0)
    k4: float = Field(ge=0.0)


class FitResult(BaseModel):
    """Least-squares estimate of (eta_gamma, mu, k1, k4)."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "eta_gamma": -0.664,
                "mu": 0.84,
                "k1": 0.3384,
                "k4": 0.3384,
                "residual": 1.2e-12,
                "covariance_proxy": {"eta_gamma": 0.01, "mu": 0.002, "k1": 0.004},
                "gamma_p": 9.3,
                "symmetric_couplers": True,
                "weighting": "absolute",
                "rank_deficient": False,
                "warnings": [],
                "converged": True,
                "starts": 27,
            }
        },
    )

    eta_gamma: float = Field(description="Controller decay-rate deviation (MHz)")
    mu: float = Field(ge=0.0, le=1.0, description="Mode-matching factor")
    k1: float = Field(ge=0.0, description="Input-coupler rate (MHz)")
    k4: float = Field(ge=0.0, description="Output-coupler rate (MHz)")
    residual: float = Field(
        ge=0.0, description="RMS of the (weighted) residual over both coordinates"
    )
    covariance_proxy: dict[str, float] = Field(
        default_factory=dict,
        description="Per-parameter standard-error proxy from the finite-difference Jacobian",
    )
    gamma_p: float = Field(gt=0.0, description="Plant decay rate held fixed")
    symmetric_couplers: bool = Field(default=False, description="k1 = k4 constraint used")
    weighting: FitWeighting = Field(
        default=FitWeighting.ABSOLUTE, description="Residual scaling used by the fit"
    )
    rank_deficient: bool = Field(default=False, description="Jacobian rank below free parameters")
    warnings: list[str] = Field(default_factory=list, description="Diagnostic warnings")
    converged: bool = Field(default=True, description="Best descent met its tolerance")
    starts: int = Field(default=1, ge=1, description="Number of multi-start descents")

    @property
    def parameters(self) -> FitParameters:
        """Fitted parameters without diagnostics."""
        return FitParameters(eta_gamma=self.eta_gamma, mu=self.mu, k1=self.k1, k4=self.k4)

    @computed_field
    @property
    def controller_decay_rate(self) -> float:
        """gamma_p - 2(k1 + k4) + eta_gamma implied by the fit (MHz)."""
        return self.gamma_p - 2.0 * (self.k1 + self.k4) + self.eta_gamma


class MeasuredValues(BaseModel):
    """Independent measurements used to cross-check a fit."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "gamma_p": 9.3,
                "gamma_c": 7.3,
                "witness_t_sq": 0.002,
                "length_m": 0.141,
                "mu_bound": 0.85,
            }
        },
    )

    gamma_p: float = Field(gt=0.0, description="Measured plant decay rate (MHz)")
    gamma_c: float = Field(gt=0.0, description="Measured controller decay rate (MHz)")
    witness_t_sq: float = Field(
        ge=0.0, le=1.0, description="Witness-sample coupler power transmission"
    )
    length_m: float = Field(gt=0.0, description="Plant round-trip length (m)")
    mu_bound: float = Field(ge=0.0, le=1.0, description="Measured upper bound on mu")


class ConsistencyCheck(BaseModel):
    """Single pass/fail comparison of fit and measurement."""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    observed: float
    expected: float
    tolerance: float
    message: str


class ConsistencyReport(BaseModel):
    """All consistency checks for one fit."""

    model_config = ConfigDict(frozen=True)

    checks: list[ConsistencyCheck]

    @computed_field
    @property
    def all_passed(self) -> bool:
        """True when every check passed."""
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> ConsistencyCheck:
        """Look up a check by name."""
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(name)
