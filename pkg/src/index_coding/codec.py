"""
Index Code Encoder / Decoder

All vertices of one color share a coding vector, so the transmitted codeword
is X = G S where S[c] is the XOR of the distinct packets colored c. A receiver
strips the classes' cached contributions and solves a local system whose
unknowns are its wanted packet and the residues of its out-neighbours' colors.
"""

import struct
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Union

import numpy as np

from config import FIELD_BITS, PAYLOAD_SYMBOLS
from src.coloring.outcome import ColoringOutcome
from src.conflict_graph.graph import ConflictGraph
from src.exceptions import DecodeError, DimensionMismatchError, InvalidInputError
from src.network.model import PacketId
from src.utils.logger import logger
from src.utils.seeding import SeedLike, make_rng

from .field import GaloisField, galois_field
from .mds import CodingMatrix, mds_generator

PacketKey = Union[int, PacketId]

_FRAME_HEADER = struct.Struct('<II')


@dataclass(frozen=True, eq=False)
class Codeword:
    """nu transmitted rows, each a vector of payload symbols."""
    symbols: np.ndarray
    field: GaloisField

    @property
    def nu(self) -> int:
        return self.symbols.shape[0]

    @property
    def payload_length(self) -> int:
        return self.symbols.shape[1]

    def to_bytes(self) -> bytes:
        """[nu: u32][payload-len: u32][row-major little-endian symbols]."""
        body = self.symbols.astype(np.dtype(self.field.dtype).newbyteorder('<')).tobytes(order='C')
        return _FRAME_HEADER.pack(self.nu, self.payload_length) + body

    @classmethod
    def from_bytes(cls, data: bytes, field: Optional[GaloisField] = None) -> 'Codeword':
        field = field or galois_field(FIELD_BITS)
        if len(data) < _FRAME_HEADER.size:
            raise DimensionMismatchError("frame shorter than its header")
        nu, length = _FRAME_HEADER.unpack_from(data)
        dtype = np.dtype(field.dtype).newbyteorder('<')
        expected = _FRAME_HEADER.size + nu * length * dtype.itemsize
        if len(data) != expected:
            raise DimensionMismatchError(f"frame holds {len(data)} bytes, header implies {expected}")
        symbols = np.frombuffer(data, dtype=dtype, offset=_FRAME_HEADER.size).reshape(nu, length)
        return cls(symbols.astype(field.dtype), field)


def _packet_table(g: ConflictGraph, payloads: Mapping[PacketKey, np.ndarray], codes: np.ndarray, field: GaloisField) -> np.ndarray:
    """Payload rows for the requested-packet codes in ``codes``."""
    normalized = {(k.global_id(g.B) if isinstance(k, PacketId) else int(k)): v for k, v in payloads.items()}
    rows = []
    for code in codes.tolist():
        pid = int(g.packet_ids[code])
        if pid not in normalized:
            raise InvalidInputError(f"no payload for packet {PacketId.from_global(pid, g.B)}")
        rows.append(field.asarray(normalized[pid]))
    if not rows:
        return np.zeros((0, 0), dtype=field.dtype)
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise DimensionMismatchError(f"payloads have mixed lengths {sorted(lengths)}")
    return np.stack(rows)


def _class_codes(g: ConflictGraph, c: ColoringOutcome):
    """Distinct packet codes in every color class."""
    return [np.unique(g.code[members]) for members in c.coloring.classes()]


def _check_dims(g: ConflictGraph, c: ColoringOutcome, G: CodingMatrix):
    if len(c.coloring) != g.size:
        raise DimensionMismatchError(f"coloring covers {len(c.coloring)} vertices, graph has {g.size}")
    if G.chi != c.num_colors or G.nu != c.local_number:
        raise DimensionMismatchError(
            f"generator is {G.nu}x{G.chi}, coloring needs {c.local_number}x{c.num_colors}"
        )
    # Each packet enters exactly one class symbol
    for grp in g.packet_groups:
        spread = np.unique(c.coloring.color_of[grp])
        if spread.size > 1:
            pid = PacketId.from_global(int(g.packet[grp[0]]), g.B)
            raise InvalidInputError(f"packet {pid} spans colors {spread.tolist()}")


def _xor_rows(table: np.ndarray, rows: np.ndarray, length: int, dtype) -> np.ndarray:
    if not len(rows):
        return np.zeros(length, dtype=dtype)
    return np.bitwise_xor.reduce(table[rows], axis=0)


def encode(g: ConflictGraph, c: ColoringOutcome, G: CodingMatrix, payloads: Mapping[PacketKey, np.ndarray]) -> Codeword:
    _check_dims(g, c, G)
    field = G.field
    table = _packet_table(g, payloads, np.arange(len(g.packet_ids)), field)
    length = table.shape[1] if table.size else 0
    S = np.stack([_xor_rows(table, codes, length, field.dtype) for codes in _class_codes(g, c)]) \
        if G.chi else np.zeros((0, length), dtype=field.dtype)
    return Codeword(field.matmul(G.G, S) if G.nu else np.zeros((0, length), dtype=field.dtype), field)


def decode(
    u: int,
    codeword: Codeword,
    G: CodingMatrix,
    c: ColoringOutcome,
    g: ConflictGraph,
    cache_payloads: Mapping[PacketKey, np.ndarray]
) -> Dict[PacketId, np.ndarray]:
    """Recover every packet user ``u`` still needs."""
    _check_dims(g, c, G)
    if codeword.nu != G.nu:
        raise DimensionMismatchError(f"codeword has {codeword.nu} rows, generator has {G.nu}")
    if not 0 <= u < g.n_users:
        raise InvalidInputError(f"user {u} outside [0, {g.n_users})")
    wanted = g.user_vertices(u)
    if not wanted.size:
        return {}

    field = G.field
    length = codeword.payload_length
    cached = g.cached_req[u]
    known_codes = np.flatnonzero(cached)
    known = _packet_table(g, cache_payloads, known_codes, field)
    row_of = {code: i for i, code in enumerate(known_codes.tolist())}

    class_codes = _class_codes(g, c)
    known_part = np.zeros((G.chi, length), dtype=field.dtype)
    lacked = []
    for color, codes in enumerate(class_codes):
        have = codes[cached[codes]]
        if have.size:
            known_part[color] = np.bitwise_xor.reduce(known[[row_of[k] for k in have.tolist()]], axis=0)
        lacked.append(codes[~cached[codes]])
    residual = codeword.symbols ^ field.matmul(G.G, known_part)

    lacked_count = np.array([len(codes) for codes in lacked], dtype=np.int64)
    only_code = np.array([codes[0] if len(codes) == 1 else -1 for codes in lacked], dtype=np.int64)

    recovered: Dict[PacketId, np.ndarray] = {}
    for v in wanted.tolist():
        p = int(g.code[v])
        # Classes still carrying some other unknown packet after the cache is stripped
        others = np.flatnonzero((lacked_count >= 2) | ((lacked_count == 1) & (only_code != p)))
        wanted_column = G.G[:, c.coloring.color_of[v]]
        system = np.column_stack([wanted_column, G.G[:, others]])
        try:
            solution = field.solve(system, residual)
        except DecodeError as e:
            raise DecodeError(f"user {u} cannot decode vertex {v}: {e}") from e
        recovered[PacketId.from_global(int(g.packet_ids[p]), g.B)] = solution[0]
    logger.debug(f"user {u} decoded {len(recovered)} packets")
    return recovered


def verify_round_trip(
    g: ConflictGraph,
    c: ColoringOutcome,
    field: Optional[GaloisField] = None,
    payload_symbols: int = PAYLOAD_SYMBOLS,
    seed: SeedLike = None
) -> int:
    """
    Encode random payloads with an MDS generator sized to ``c`` and check that
    every user recovers every requested packet bit-exactly. Returns the number
    of packets verified; raises DecodeError on any failure.
    """
    field = field or galois_field(FIELD_BITS)
    rng = make_rng(seed)
    G = mds_generator(c.num_colors, c.local_number, field)
    payloads = {int(pid): field.random(payload_symbols, rng) for pid in g.packet_ids.tolist()}
    codeword = encode(g, c, G, payloads)
    if codeword.nu != c.local_number:
        raise DecodeError(f"codeword has {codeword.nu} rows for local number {c.local_number}")

    checked = 0
    for u in range(g.n_users):
        got = decode(u, codeword, G, c, g, payloads)
        for pid, payload in got.items():
            if not np.array_equal(payload, payloads[pid.global_id(g.B)]):
                raise DecodeError(f"user {u} recovered a corrupted copy of {pid}")
            checked += 1
    if checked != g.size:
        raise DecodeError(f"verified {checked} packets, graph has {g.size} requests")
    return checked
