"""
Simulation Module
Monte Carlo experiment harness and result artifacts
"""

from .experiment import (
    ALL_SCHEMES,
    ExperimentResult,
    ExperimentSpec,
    TrialRecord,
    aggregate,
    cache_size_reduction,
    run_experiment,
    run_trial,
)
from .output import emit_csv, emit_json, emit_plot, emit_trials_csv

__all__ = [
    'ALL_SCHEMES',
    'ExperimentResult',
    'ExperimentSpec',
    'TrialRecord',
    'aggregate',
    'cache_size_reduction',
    'run_experiment',
    'run_trial',
    'emit_csv',
    'emit_json',
    'emit_plot',
    'emit_trials_csv',
]
