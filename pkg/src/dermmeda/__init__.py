"""Hybrid DE / regularity-model EDA for multi-objective optimization."""

from .algorithms import AlgoConfig, Algorithm, RunResult, run, run_de_rm_meda, run_nsga2_de, run_rm_meda
from .benchmarks import ProblemId, make_problem, sample_true_pf
from .core import BoxBounds, EvaluationError, Population, dominates, repair
from .metrics import igd

__all__ = [
    "AlgoConfig",
    "Algorithm",
    "BoxBounds",
    "EvaluationError",
    "Population",
    "ProblemId",
    "RunResult",
    "dominates",
    "igd",
    "make_problem",
    "repair",
    "run",
    "run_de_rm_meda",
    "run_nsga2_de",
    "run_rm_meda",
    "sample_true_pf",
]

__version__ = "0.1.0"
