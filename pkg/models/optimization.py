from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.power import SchemeFamily
from models.report import EngineKind


class Objective(str, Enum):
    MAX_MIN_RATE = "max_min_rate"
    MAX_ASE = "max_ase"
    MAX_EE = "max_ee"


# Parameter order per family; the first entry is the power-like one used for tie breaking.
FAMILY_PARAMETERS = {
    SchemeFamily.CPC: ("p_max",),
    SchemeFamily.UPC: ("p_min", "p_max"),
    SchemeFamily.FPC: ("p_bar", "epsilon"),
    SchemeFamily.APC: ("p_bar", "xi"),
}


class ParameterBox(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    low: float
    high: float

    @model_validator(mode="after")
    def _check_order(self) -> "ParameterBox":
        if self.low > self.high:
            raise ValueError(f"empty box for {self.name}: [{self.low}, {self.high}]")
        return self

    @property
    def width(self) -> float:
        return self.high - self.low


class OptimizationProblem(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: SchemeFamily
    boxes: Tuple[ParameterBox, ...]
    objective: Objective = Objective.MAX_MIN_RATE
    engine: EngineKind = EngineKind.BOUND_LOWER
    traffic_weights: Tuple[float, float] = (1.0, 1.0)  # (dl, ul)
    grid_points: int = Field(default=32, ge=1)
    tolerance: float = Field(default=1e-3, gt=0, description="fraction of box width")

    @model_validator(mode="after")
    def _check_boxes(self) -> "OptimizationProblem":
        expected = FAMILY_PARAMETERS[self.family]
        names = tuple(box.name for box in self.boxes)
        if names != expected:
            raise ValueError(f"{self.family.value} expects boxes for {expected}, got {names}")
        if min(self.traffic_weights) <= 0:
            raise ValueError("traffic weights must be positive")
        return self


class TraceEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    parameters: Tuple[float, ...]
    value: float
    rate_ul: float
    rate_dl: float
    stage: str  # "grid" or "refine"


class OptimizationResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: SchemeFamily
    parameter_names: Tuple[str, ...]
    best_parameters: Tuple[float, ...]
    value: float
    rate_ul: float
    rate_dl: float
    trace: List[TraceEntry]


class SIRequirement(BaseModel):
    """Largest residual SI ratio whose FD/HD crossover still reaches the target distance."""

    model_config = ConfigDict(frozen=True)

    target_distance: float
    feasible: bool
    beta: Optional[float] = None  # linear; inf when any beta works
    crossover_at_beta: Optional[float] = None

    @property
    def unbounded(self) -> bool:
        return self.feasible and self.beta == float("inf")
