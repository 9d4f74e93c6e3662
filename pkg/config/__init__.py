"""
Configuration Module
Loads config/config.yaml; CODED_CACHING_CONFIG points at an alternate file.
"""

import os
from pathlib import Path
from typing import Any, Dict

import yaml

CONFIG_PATH = Path(os.environ.get('CODED_CACHING_CONFIG', Path(__file__).resolve().parent / 'config.yaml'))


def load_settings(path: Path = CONFIG_PATH) -> Dict[str, Any]:
    """Read the YAML settings file into a plain dict."""
    with open(path, 'r') as f:
        return yaml.safe_load(f) or {}


SETTINGS = load_settings()

HGLC_A = float(SETTINGS['coloring']['hglc']['a'])
HGLC_B = float(SETTINGS['coloring']['hglc']['b'])
GCLC1_GROUPING = SETTINGS['coloring']['gclc1_grouping']
ORACLE_MAX_VERTICES = int(SETTINGS['coloring']['oracle_max_vertices'])

FIELD_BITS = int(SETTINGS['index_coding']['field_bits'])
PAYLOAD_SYMBOLS = int(SETTINGS['index_coding']['payload_symbols'])
MDS_EXHAUSTIVE_LIMIT = int(SETTINGS['index_coding']['mds_exhaustive_limit'])
MDS_RANDOM_SUBSETS = int(SETTINGS['index_coding']['mds_random_subsets'])

RHO_EXPONENT = SETTINGS['analysis']['rho_exponent']
EXACT_OUTCOME_LIMIT = int(float(SETTINGS['analysis']['exact_outcome_limit']))
MAX_ENUMERATED_USERS = int(SETTINGS['analysis']['max_enumerated_users'])
ANALYSIS_SAMPLES = int(SETTINGS['analysis']['samples'])
ANALYSIS_SUBSET_SAMPLES = int(SETTINGS['analysis']['subset_samples'])

VERIFY_CODING_MAX_VERTICES = int(SETTINGS['simulation']['verify_coding_max_vertices'])
CI_MIN_TRIALS = int(SETTINGS['simulation']['ci_min_trials'])


def worker_count() -> int:
    """Worker pool size: COLOR_THREADS, then config, then the CPU count."""
    env = os.environ.get('COLOR_THREADS')
    if env:
        return max(1, int(env))
    configured = int(SETTINGS['simulation']['workers'])
    return configured if configured > 0 else (os.cpu_count() or 1)


__all__ = [
    'SETTINGS',
    'load_settings',
    'worker_count',
    'HGLC_A',
    'HGLC_B',
    'GCLC1_GROUPING',
    'ORACLE_MAX_VERTICES',
    'FIELD_BITS',
    'PAYLOAD_SYMBOLS',
    'MDS_EXHAUSTIVE_LIMIT',
    'MDS_RANDOM_SUBSETS',
    'RHO_EXPONENT',
    'EXACT_OUTCOME_LIMIT',
    'MAX_ENUMERATED_USERS',
    'ANALYSIS_SAMPLES',
    'ANALYSIS_SUBSET_SAMPLES',
    'VERIFY_CODING_MAX_VERTICES',
    'CI_MIN_TRIALS',
]
