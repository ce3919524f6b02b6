from .config import ExperimentConfig, load_config
from .runner import run_experiment, run_ood_matrix, run_cell, PartialRunError
from .analysis import diff_error_analysis, ErrorAnalysisReport
from .tables import emit_table, emit_tables

__all__ = [
    "ExperimentConfig",
    "load_config",
    "run_experiment",
    "run_ood_matrix",
    "run_cell",
    "PartialRunError",
    "diff_error_analysis",
    "ErrorAnalysisReport",
    "emit_table",
    "emit_tables",
]
