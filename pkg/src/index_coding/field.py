"""
Binary extension fields GF(2^8) and GF(2^16)

Elements are stored as unsigned integers; addition is XOR and
multiplication goes through exp/log tables of a primitive element.
Tables are built once per field size and shared read-only.
"""

from functools import lru_cache

import numpy as np

from src.exceptions import DecodeError, InvalidConfigError

# Primitive polynomials, generator alpha = x
PRIMITIVE_POLYNOMIALS = {
    8: 0x11D,
    16: 0x1100B,
}


class GaloisField:
    """GF(2^bits) with vectorised numpy arithmetic."""

    def __init__(self, bits: int = 16):
        if bits not in PRIMITIVE_POLYNOMIALS:
            raise InvalidConfigError(f"supported field sizes are {sorted(PRIMITIVE_POLYNOMIALS)}, got {bits}", field="field_bits")
        self.bits = bits
        self.order = 1 << bits
        self.dtype = np.uint8 if bits == 8 else np.uint16
        self.poly = PRIMITIVE_POLYNOMIALS[bits]

        period = self.order - 1
        exp = np.zeros(2 * period, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(period):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.order:
                x ^= self.poly
        exp[period:] = exp[:period]
        for table in (exp, log):
            table.setflags(write=False)
        self.exp = exp
        self.log = log

    def __repr__(self) -> str:
        return f"GaloisField(2^{self.bits})"

    @property
    def nonzero_count(self) -> int:
        return self.order - 1

    def element(self, i: int) -> int:
        """alpha^i."""
        return int(self.exp[i % (self.order - 1)])

    def asarray(self, values) -> np.ndarray:
        arr = np.asarray(values)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            raise ValueError(f"values outside GF(2^{self.bits})")
        return arr.astype(self.dtype)

    def random(self, shape, rng: np.random.Generator, nonzero: bool = False) -> np.ndarray:
        low = 1 if nonzero else 0
        return rng.integers(low, self.order, size=shape).astype(self.dtype)

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    @staticmethod
    def add(a, b) -> np.ndarray:
        return np.bitwise_xor(a, b)

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out).astype(self.dtype)

    def inv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        return self.exp[(self.order - 1) - self.log[a]].astype(self.dtype)

    def power(self, a, k: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if k == 0:
            return np.ones_like(a, dtype=self.dtype)
        out = self.exp[(self.log[a] * k) % (self.order - 1)]
        return np.where(a == 0, 0, out).astype(self.dtype)

    def matmul(self, A, B) -> np.ndarray:
        """(r x k) . (k x s) over the field."""
        A = np.atleast_2d(np.asarray(A))
        B = np.asarray(B)
        if B.ndim == 1:
            B = B[:, None]
        if A.shape[1] != B.shape[0]:
            raise ValueError(f"cannot multiply {A.shape} by {B.shape}")
        out = np.zeros((A.shape[0], B.shape[1]), dtype=self.dtype)
        for j in range(A.shape[1]):
            col = A[:, j]
            if not col.any():
                continue
            out ^= self.mul(col[:, None], B[j][None, :])
        return out

    # ------------------------------------------------------------------
    # Linear algebra
    # ------------------------------------------------------------------

    def _eliminate(self, aug: np.ndarray, cols: int):
        """In-place Gauss-Jordan on the first ``cols`` columns; returns pivot columns."""
        pivots = []
        row = 0
        for col in range(cols):
            if row == aug.shape[0]:
                break
            nz = np.flatnonzero(aug[row:, col])
            if not nz.size:
                continue
            piv = row + int(nz[0])
            if piv != row:
                aug[[row, piv]] = aug[[piv, row]]
            aug[row] = self.mul(aug[row], self.inv(aug[row, col]))
            others = np.flatnonzero(aug[:, col])
            others = others[others != row]
            if others.size:
                aug[others] ^= self.mul(aug[others, col][:, None], aug[row][None, :])
            pivots.append(col)
            row += 1
        return pivots

    def rank(self, A) -> int:
        aug = np.array(A, dtype=self.dtype, copy=True)
        if aug.size == 0:
            return 0
        return len(self._eliminate(aug, aug.shape[1]))

    def solve(self, A, b) -> np.ndarray:
        """
        Unique x with A x = b for a full-column-rank A (rows >= cols).
        Raises DecodeError when A is rank deficient or the system is inconsistent.
        """
        A = np.atleast_2d(np.asarray(A, dtype=self.dtype))
        b = np.asarray(b, dtype=self.dtype)
        vector = b.ndim == 1
        if vector:
            b = b[:, None]
        rows, cols = A.shape
        if b.shape[0] != rows:
            raise ValueError(f"right-hand side has {b.shape[0]} rows, matrix has {rows}")
        aug = np.concatenate([A, b], axis=1)
        pivots = self._eliminate(aug, cols)
        if len(pivots) < cols:
            raise DecodeError(f"local system has rank {len(pivots)} < {cols} unknowns")
        if aug[cols:, cols:].any():
            raise DecodeError("local system is inconsistent")
        x = aug[:cols, cols:]
        return x[:, 0] if vector else x


@lru_cache(maxsize=None)
def galois_field(bits: int = 16) -> GaloisField:
    """Shared field instance per size."""
    return GaloisField(bits)
