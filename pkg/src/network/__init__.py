"""
Network Model Module
Configuration, demand sampling and cache placement for the shared-link network
"""

from .model import CacheRealization, DemandRealization, NetworkConfig, PacketId, realization_from_dict
from .demand import sample_demands, zipf_distribution
from .placement import lfu_place, rap_place

__all__ = [
    'NetworkConfig',
    'PacketId',
    'CacheRealization',
    'DemandRealization',
    'realization_from_dict',
    'zipf_distribution',
    'sample_demands',
    'rap_place',
    'lfu_place',
]
