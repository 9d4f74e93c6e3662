"""
MDS generator matrices: one coding vector per color, any nu of which are
linearly independent.
"""

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from config import FIELD_BITS, MDS_EXHAUSTIVE_LIMIT, MDS_RANDOM_SUBSETS
from src.exceptions import FieldTooSmallError, InvalidInputError
from src.utils.logger import logger
from src.utils.seeding import SeedLike, make_rng

from .field import GaloisField, galois_field


@dataclass(frozen=True, eq=False)
class CodingMatrix:
    """nu x chi generator G; column c is the coding vector of color c."""
    G: np.ndarray
    field: GaloisField

    def __post_init__(self):
        arr = np.array(self.G, dtype=self.field.dtype, copy=True)
        if arr.ndim != 2:
            raise InvalidInputError(f"generator must be 2-D, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, 'G', arr)

    @property
    def nu(self) -> int:
        return self.G.shape[0]

    @property
    def chi(self) -> int:
        return self.G.shape[1]

    def column(self, c: int) -> np.ndarray:
        return self.G[:, c]


def mds_generator(chi: int, nu: int, field: Optional[GaloisField] = None) -> CodingMatrix:
    """
    Identity when nu == chi, the systematic [I | 1] form when nu == chi - 1,
    otherwise a Vandermonde matrix on the distinct points alpha^0..alpha^(chi-1).
    """
    field = field or galois_field(FIELD_BITS)
    if not 0 <= nu <= chi:
        raise InvalidInputError(f"need 0 <= nu <= chi, got nu={nu}, chi={chi}")
    if chi > field.nonzero_count:
        raise FieldTooSmallError(
            f"{chi} colors need {chi} distinct nonzero points but GF(2^{field.bits}) has {field.nonzero_count}; "
            f"use field_bits=16"
        )

    if nu == chi:
        G = np.eye(chi, dtype=field.dtype)
    elif nu == chi - 1:
        G = np.concatenate([np.eye(nu, dtype=field.dtype), np.ones((nu, 1), dtype=field.dtype)], axis=1)
    else:
        points = field.exp[:chi]
        exponents = np.arange(nu)
        log_points = field.log[points]
        G = field.exp[(exponents[:, None] * log_points[None, :]) % field.nonzero_count].astype(field.dtype)
    return CodingMatrix(G, field)


def check_mds(
    matrix: CodingMatrix,
    exhaustive_limit: int = MDS_EXHAUSTIVE_LIMIT,
    random_subsets: int = MDS_RANDOM_SUBSETS,
    seed: SeedLike = None
) -> bool:
    """Every nu-subset of columns has full rank; random subsets once C(chi, nu) is too large."""
    nu, chi = matrix.nu, matrix.chi
    if nu == 0:
        return True
    field = matrix.field
    total = math.comb(chi, nu)
    if total <= exhaustive_limit:
        subsets = combinations(range(chi), nu)
    else:
        rng = make_rng(seed)
        subsets = (np.sort(rng.choice(chi, size=nu, replace=False)) for _ in range(random_subsets))
        logger.debug(f"MDS check on {random_subsets} random subsets of {total}")
    for cols in subsets:
        if field.rank(matrix.G[:, list(cols)]) < nu:
            logger.warning(f"columns {list(cols)} of the {nu}x{chi} generator are dependent")
            return False
    return True
