from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Annotated


class SchemeFamily(str, Enum):
    CPC = "cpc"
    UPC = "upc"
    FPC = "fpc"
    APC = "apc"


class ConstantPowerControl(BaseModel):
    """Every BS transmits at its peak power."""

    model_config = ConfigDict(frozen=True)

    family: Literal[SchemeFamily.CPC] = SchemeFamily.CPC
    p_max: float = Field(gt=0)

    @property
    def parameters(self) -> Tuple[float, ...]:
        return (self.p_max,)


class UniformPowerControl(BaseModel):
    """Each BS draws its power uniformly from [p_min, p_max]."""

    model_config = ConfigDict(frozen=True)

    family: Literal[SchemeFamily.UPC] = SchemeFamily.UPC
    p_min: float = Field(gt=0)
    p_max: float = Field(gt=0)

    @model_validator(mode="after")
    def _check_range(self) -> "UniformPowerControl":
        if not self.p_min < self.p_max:
            raise ValueError(f"UPC requires p_min < p_max, got [{self.p_min}, {self.p_max}]")
        return self

    @property
    def parameters(self) -> Tuple[float, ...]:
        return (self.p_min, self.p_max)


class FractionalPowerControl(BaseModel):
    """Power p_bar * R^(alpha*epsilon), clipped at p_max; no lower clipping."""

    model_config = ConfigDict(frozen=True)

    family: Literal[SchemeFamily.FPC] = SchemeFamily.FPC
    p_bar: float = Field(gt=0)
    epsilon: float = Field(ge=0, le=1)
    p_max: float = Field(gt=0)

    @property
    def parameters(self) -> Tuple[float, ...]:
        return (self.p_bar, self.epsilon)


class OnOffPowerControl(BaseModel):
    """ALOHA-like: p_bar with probability xi, otherwise asleep."""

    model_config = ConfigDict(frozen=True)

    family: Literal[SchemeFamily.APC] = SchemeFamily.APC
    p_bar: float = Field(gt=0)
    xi: float = Field(ge=0, le=1)
    p_max: float = Field(gt=0)

    @model_validator(mode="after")
    def _check_peak(self) -> "OnOffPowerControl":
        if self.p_bar > self.p_max:
            raise ValueError(f"APC p_bar ({self.p_bar} W) exceeds p_max ({self.p_max} W)")
        return self

    @property
    def parameters(self) -> Tuple[float, ...]:
        return (self.p_bar, self.xi)


PowerControlScheme = Annotated[
    Union[ConstantPowerControl, UniformPowerControl, FractionalPowerControl, OnOffPowerControl],
    Field(discriminator="family"),
]


@dataclass(frozen=True)
class MixedPowerDistribution:
    """Marginal BS transmit-power law: a density on (lower, upper) plus point atoms.

    Atoms are (location W, mass). An off state is an explicit atom at 0.
    """

    p_max: float
    atoms: Tuple[Tuple[float, float], ...] = ()
    continuous_density: Optional[Callable[[float], float]] = field(default=None, compare=False)
    continuous_support: Tuple[float, float] = (0.0, 0.0)
    # E{fn(P)} over the continuous part, when a change of variables beats direct quadrature
    continuous_expectation: Optional[Callable[[Callable[[float], float]], float]] = field(default=None, compare=False)

    @property
    def has_continuous_part(self) -> bool:
        return self.continuous_density is not None
