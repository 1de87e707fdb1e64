"""Datasets, metrics, run persistence and reports."""

from .dataset import load_dataset
from .metrics import (
    best_of_n,
    execution_accuracy,
    node_entropy,
    pass_at_n,
    path_mean_value,
    pruning_statistics,
    retained_fraction,
    tree_entropy,
)
from .records import RunRecord
from .report import MetricsTable, metric_value, parse_metric
from .runner import BenchmarkRunner
from .store import RunStore, load_run_file, run_key

__all__ = [
    "load_dataset",
    "best_of_n",
    "execution_accuracy",
    "node_entropy",
    "pass_at_n",
    "path_mean_value",
    "pruning_statistics",
    "retained_fraction",
    "tree_entropy",
    "RunRecord",
    "MetricsTable",
    "metric_value",
    "parse_metric",
    "BenchmarkRunner",
    "RunStore",
    "load_run_file",
    "run_key",
]
