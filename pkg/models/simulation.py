import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config.settings import settings

Z_95 = 1.959963984540054

# coverage level the default trial count is sized for
REFERENCE_COVERAGE = 0.4


def trials_for_halfwidth(p: float, halfwidth: float) -> int:
    """Bernoulli trials needed for a 95% CI half-width at success probability p."""
    return int(math.ceil(Z_95 ** 2 * p * (1.0 - p) / halfwidth ** 2))


class EdgeHandling(str, Enum):
    GUARD_ZONE = "guard_zone"
    TORUS = "torus"


class SimulationSpec(BaseModel):
    """Monte-Carlo settings.

    `window_radius=None` means 10/sqrt(lambda_bs). Without an explicit
    `n_trials` the count is sized so a coverage near 0.4 gets a 95% CI no
    wider than `target_ci_halfwidth`.
    """

    model_config = ConfigDict(frozen=True)

    window_radius: Optional[float] = Field(default=None, gt=0, description="m")
    n_trials: int = Field(default=None, ge=1)
    seed: int = Field(default=settings.default_seed, ge=0, lt=2 ** 64)
    edge_handling: EdgeHandling = EdgeHandling.GUARD_ZONE
    guard_fraction: float = Field(default=0.2, ge=0, lt=1)
    target_ci_halfwidth: float = Field(default=settings.mc_target_ci_halfwidth, gt=0, lt=0.5)
    chunk_size: int = Field(default=settings.mc_chunk_size, ge=1)
    workers: int = Field(default=settings.mc_workers, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _size_trials(cls, data: Any) -> Any:
        if not isinstance(data, dict) or data.get("n_trials") is not None:
            return data
        target = data.get("target_ci_halfwidth", settings.mc_target_ci_halfwidth)
        try:
            target = float(target)
        except (TypeError, ValueError):
            return data
        if target <= 0:
            # left to the field validator
            return data
        return {**data, "n_trials": trials_for_halfwidth(REFERENCE_COVERAGE, target)}

    def resolved_window(self, lambda_bs: float) -> float:
        minimum = 10.0 / np.sqrt(lambda_bs)
        return minimum if self.window_radius is None else self.window_radius


@dataclass(frozen=True)
class Deployment:
    """One realization of the interfering pairs plus the typical pair.

    Index 0 of every array is the typical pair: its UE sits at the origin and
    `bs_positions[0]` is its serving BS. `ue_offsets` holds the mark, the
    paired UE position relative to its BS.
    """

    bs_positions: np.ndarray  # (n, 2) m
    ue_offsets: np.ndarray  # (n, 2) m
    powers: np.ndarray  # (n,) W
    active: np.ndarray  # (n,) bool

    @property
    def ue_positions(self) -> np.ndarray:
        return self.bs_positions + self.ue_offsets

    @property
    def link_distances(self) -> np.ndarray:
        return np.hypot(self.ue_offsets[:, 0], self.ue_offsets[:, 1])

    def __len__(self) -> int:
        return self.powers.shape[0]
