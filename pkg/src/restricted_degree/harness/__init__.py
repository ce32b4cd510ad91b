"""Experiment configuration, replica execution, persistence and reports."""

from .config import ExperimentConfig, load_config
from .diagnostics import check_conditions
from .report import compare_report
from .runner import run_experiment

__all__ = ["ExperimentConfig", "load_config", "run_experiment", "compare_report", "check_conditions"]
