"""
Analysis Module
Asymptotic rate bounds for RAP + GCLC and the LFU baseline
"""

from .bounds import (
    CachingOptimum,
    PsiEstimate,
    RateBound,
    RateBoundCalculator,
    RequestProfile,
    M_bar,
    lfu_rate,
    m_bar,
    optimize_caching_distribution,
    psi_heterogeneous,
    psi_homogeneous,
    rate_bound,
)

__all__ = [
    'CachingOptimum',
    'PsiEstimate',
    'RateBound',
    'RateBoundCalculator',
    'RequestProfile',
    'M_bar',
    'lfu_rate',
    'm_bar',
    'optimize_caching_distribution',
    'psi_heterogeneous',
    'psi_homogeneous',
    'rate_bound',
]
