from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Tuple
import math


class NetworkConfig(BaseModel):
    """Physical-layer and deployment parameters, all in SI linear units."""

    model_config = ConfigDict(frozen=True)

    lambda_bs: float = Field(default=1e-6, gt=0, description="BS density (1/m^2)")
    lambda_ue: float = Field(default=1e-5, ge=0, description="UE density (1/m^2)")
    alpha: float = Field(default=4.0, gt=2, description="Path-loss exponent")
    beta: float = Field(default=1e-10, ge=0, description="Residual SI-to-power ratio (linear)")
    p_ue: float = Field(default=0.2, gt=0, description="UE transmit power (W)")
    p_static: float = Field(default=0.15, gt=0, description="Static circuit power (W)")
    p_max: float = Field(default=2.0, gt=0, description="BS peak power (W)")
    p_min: float = Field(default=0.2, gt=0, description="BS minimum power (W)")
    bandwidth_w: float = Field(default=10e6, gt=0, description="Spectrum width (Hz)")
    rate_bs: float = Field(default=10e6, ge=0, description="Target rate received by the BS, UL (bps)")
    rate_ue: float = Field(default=10e6, ge=0, description="Target rate received by the UE, DL (bps)")
    apc_ue_always_on: bool = Field(default=True, description="Paired UE keeps transmitting while its APC BS sleeps")
    apc_rate_includes_xi: bool = Field(default=True, description="APC DL rate carries the transmit probability")

    @model_validator(mode="after")
    def _check_power_range(self) -> "NetworkConfig":
        if self.p_min > self.p_max:
            raise ValueError(f"p_min ({self.p_min} W) must not exceed p_max ({self.p_max} W)")
        return self

    @property
    def delta(self) -> "Delta":
        return Delta(value=2.0 / self.alpha)

    @property
    def theta_b(self) -> float:
        """UL SIR threshold, decoded at the BS."""
        return 2.0 ** (self.rate_bs / self.bandwidth_w) - 1.0

    @property
    def theta_u(self) -> float:
        """DL SIR threshold, decoded at the UE."""
        return 2.0 ** (self.rate_ue / self.bandwidth_w) - 1.0

    def thresholds(self) -> Tuple[float, float]:
        return self.theta_b, self.theta_u

    def with_updates(self, **changes) -> "NetworkConfig":
        """Validated copy; `model_copy(update=...)` skips validation."""
        return NetworkConfig(**{**self.model_dump(), **changes})


class Delta(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float = Field(gt=0, lt=1)

    @property
    def kernel(self) -> float:
        """pi^2 delta / sin(pi delta), the constant shared by every bound."""
        return math.pi ** 2 * self.value / math.sin(math.pi * self.value)


class ActiveDensity(BaseModel):
    model_config = ConfigDict(frozen=True)

    lambda_b: float = Field(ge=0)
    p0: float = Field(ge=0, le=1)
