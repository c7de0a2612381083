"""Rate sweeps, audits and constant reports built on the scheme."""

from .config import ExperimentConfig, load_config, parse_config
from .report import ExperimentReport, fit_slope
from .runners import (
    report_constants,
    run_clt_experiment,
    run_consistency_audit,
    run_rate_experiment,
    run_regularity_audit,
    run_solve,
)

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "fit_slope",
    "load_config",
    "parse_config",
    "report_constants",
    "run_clt_experiment",
    "run_consistency_audit",
    "run_rate_experiment",
    "run_regularity_audit",
    "run_solve",
]
