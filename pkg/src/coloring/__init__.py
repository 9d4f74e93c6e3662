"""
Coloring Module
Local colorings of the conflict graph: GCLC, HgLC and an exact oracle
"""

from .outcome import (
    Algorithm,
    Coloring,
    ColoringOutcome,
    HglcParams,
    local_number,
    neighborhood_color_counts,
    validate_coloring,
)
from .gclc import gclc, gclc1, gclc2
from .hglc import hglc, hglc1, local_search
from .oracle import brute_force_oracle

__all__ = [
    'Algorithm',
    'Coloring',
    'ColoringOutcome',
    'HglcParams',
    'local_number',
    'neighborhood_color_counts',
    'validate_coloring',
    'gclc',
    'gclc1',
    'gclc2',
    'hglc',
    'hglc1',
    'local_search',
    'brute_force_oracle',
]
