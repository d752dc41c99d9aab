from enum import Enum
from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field

from models.network import NetworkConfig
from models.power import PowerControlScheme


class BoundKind(str, Enum):
    UPPER = "upper"
    LOWER = "lower"
    EXACT = "exact"


class EngineKind(str, Enum):
    """Where a figure comes from: one of the analytic kinds or simulation."""

    BOUND_UPPER = "bound_upper"
    BOUND_LOWER = "bound_lower"
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"

    @property
    def bound_kind(self) -> Optional[BoundKind]:
        return {
            EngineKind.BOUND_UPPER: BoundKind.UPPER,
            EngineKind.BOUND_LOWER: BoundKind.LOWER,
            EngineKind.EXACT: BoundKind.EXACT,
        }.get(self)

    @classmethod
    def from_bound(cls, kind: BoundKind) -> "EngineKind":
        return {
            BoundKind.UPPER: cls.BOUND_UPPER,
            BoundKind.LOWER: cls.BOUND_LOWER,
            BoundKind.EXACT: cls.EXACT,
        }[kind]


class Direction(str, Enum):
    UL = "ul"
    DL = "dl"


class DuplexMode(str, Enum):
    FD = "fd"
    HD = "hd"


class EstimateWithCI(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float
    ci_halfwidth_95: float = Field(ge=0)
    n_trials: int = Field(ge=1)

    @property
    def low(self) -> float:
        return self.mean - self.ci_halfwidth_95

    @property
    def high(self) -> float:
        return self.mean + self.ci_halfwidth_95


class PerformanceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    p_ul: float = Field(ge=0, le=1)
    p_dl: float = Field(ge=0, le=1)
    rate_ul: float = Field(ge=0, description="bps")
    rate_dl: float = Field(ge=0, description="bps")
    ase: float = Field(ge=0, description="bps/Hz/m^2")
    ee: float = Field(ge=0, description="bps/J")
    ci_halfwidth: Optional[Dict[str, float]] = None
    source: EngineKind

    @property
    def total_rate(self) -> float:
        return self.rate_ul + self.rate_dl

    @property
    def min_rate(self) -> float:
        return min(self.rate_ul, self.rate_dl)


class LaplaceQuery(BaseModel):
    """One evaluation point of the interference Laplace transform; s is in units of theta R^alpha / P."""

    model_config = ConfigDict(frozen=True)

    s: float = Field(ge=0)
    config: NetworkConfig
    scheme: PowerControlScheme
