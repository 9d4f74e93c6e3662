"""
Index Coding Module
GF(2^q) arithmetic, MDS generators and the coded multicast encoder/decoder
"""

from .field import GaloisField, galois_field
from .mds import CodingMatrix, check_mds, mds_generator
from .codec import Codeword, decode, encode, verify_round_trip

__all__ = [
    'GaloisField',
    'galois_field',
    'CodingMatrix',
    'check_mds',
    'mds_generator',
    'Codeword',
    'encode',
    'decode',
    'verify_round_trip',
]
