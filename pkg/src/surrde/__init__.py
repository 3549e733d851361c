"""Surrogate-assisted Differential Evolution toolkit."""

from .core import (
    Bounds,
    BudgetExhaustedError,
    EvaluatedSolution,
    EvaluationLedger,
    RngStreams,
    clamp,
    is_better,
)
from .experiment import (
    ExperimentConfig,
    load_config,
    report,
    run_experiment,
    run_kriging_offline,
)
from .learners import LearnerSpec, latin_hypercube_sample
from .optimizer import DEConfig, RunRecord, run_optimization, run_shadow
from .strategies import RunningMeans, StrategyFlags
from .surrogate import SurrogateConfig

__all__ = [
    "Bounds",
    "BudgetExhaustedError",
    "DEConfig",
    "EvaluatedSolution",
    "EvaluationLedger",
    "ExperimentConfig",
    "LearnerSpec",
    "RngStreams",
    "RunRecord",
    "RunningMeans",
    "StrategyFlags",
    "SurrogateConfig",
    "clamp",
    "is_better",
    "latin_hypercube_sample",
    "load_config",
    "report",
    "run_experiment",
    "run_kriging_offline",
    "run_optimization",
    "run_shadow",
]

__version__ = "0.1.0"
