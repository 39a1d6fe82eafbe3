"""Swarm-metaheuristic parameter estimation for software reliability growth models."""

from .failure_data import (
    DataSplit,
    DatasetError,
    FailureDataset,
    SyntheticMode,
    generate_synthetic,
    load_csv,
    split_chronological,
    write_csv,
)
from .fitness import Metric, Objective, euclidean_distance, evaluate, rmse
from .harness import ComparisonReport, ExperimentPlan, ReportFormat, emit_report, grid_oracle, run_plan
from .models import DomainError, ModelKind, Params, SearchSpace, default_bounds, failure_intensity, mean_value
from .optimizers import (
    ACOConfig,
    CuckooConfig,
    FireflyConfig,
    OptimizationError,
    PSOConfig,
    RunResult,
    minimize,
)

__version__ = "0.1.0"
