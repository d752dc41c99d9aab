from models.network import ActiveDensity, Delta, NetworkConfig
from models.power import (
    ConstantPowerControl,
    FractionalPowerControl,
    MixedPowerDistribution,
    OnOffPowerControl,
    PowerControlScheme,
    SchemeFamily,
    UniformPowerControl,
)
from models.report import (
    BoundKind,
    Direction,
    DuplexMode,
    EngineKind,
    EstimateWithCI,
    LaplaceQuery,
    PerformanceReport,
)
from models.simulation import Deployment, EdgeHandling, SimulationSpec
from models.optimization import (
    Objective,
    OptimizationProblem,
    OptimizationResult,
    ParameterBox,
    SIRequirement,
    TraceEntry,
)

__all__ = [
    "ActiveDensity",
    "BoundKind",
    "ConstantPowerControl",
    "Delta",
    "Deployment",
    "Direction",
    "DuplexMode",
    "EdgeHandling",
    "EngineKind",
    "EstimateWithCI",
    "LaplaceQuery",
    "FractionalPowerControl",
    "MixedPowerDistribution",
    "NetworkConfig",
    "Objective",
    "OnOffPowerControl",
    "OptimizationProblem",
    "OptimizationResult",
    "ParameterBox",
    "PerformanceReport",
    "PowerControlScheme",
    "SIRequirement",
    "SchemeFamily",
    "SimulationSpec",
    "TraceEntry",
    "UniformPowerControl",
]
