import numpy as np
import pytest

from src.coloring import Algorithm, Coloring, ColoringOutcome, HglcParams, brute_force_oracle, gclc, gclc1, gclc2, hglc, hglc1
from src.exceptions import DecodeError, DimensionMismatchError, FieldTooSmallError, InvalidConfigError, InvalidInputError
from src.index_coding import (
    CodingMatrix,
    Codeword,
    GaloisField,
    check_mds,
    decode,
    encode,
    galois_field,
    mds_generator,
    verify_round_trip,
)
from src.network.model import PacketId
from src.utils.seeding import make_rng

from tests.conftest import random_instance, tiny_instance


@pytest.fixture(params=[8, 16])
def field(request):
    return galois_field(request.param)


def test_field_axioms(field) -> None:
    rng = make_rng(0)
    a, b, c = (field.random(10_000, rng) for _ in range(3))
    assert np.array_equal(field.mul(a, b), field.mul(b, a))
    assert np.array_equal(field.mul(field.mul(a, b), c), field.mul(a, field.mul(b, c)))
    assert np.array_equal(field.mul(a, field.add(b, c)), field.add(field.mul(a, b), field.mul(a, c)))
    assert np.array_equal(field.add(field.add(a, b), c), field.add(a, field.add(b, c)))
    nz = field.random(10_000, rng, nonzero=True)
    assert np.all(field.mul(nz, field.inv(nz)) == 1)


def test_generator_is_primitive(field) -> None:
    period = field.nonzero_count
    assert len(set(field.exp[:period].tolist())) == period
    assert field.element(period) == 1
    assert int(field.power(field.element(1), period)) == 1


def test_zero_has_no_inverse() -> None:
    with pytest.raises(ZeroDivisionError):
        galois_field(8).inv([3, 0])


def test_unsupported_field_size() -> None:
    with pytest.raises(InvalidConfigError):
        GaloisField(12)


def test_solve_and_rank() -> None:
    f = galois_field(16)
    rng = make_rng(3)
    A = f.random((5, 5), rng)
    while f.rank(A) < 5:
        A = f.random((5, 5), rng)
    x = f.random((5, 3), rng)
    b = f.matmul(A, x)
    assert np.array_equal(f.solve(A, b), x)

    singular = A.copy()
    singular[:, 4] = singular[:, 0]
    assert f.rank(singular) == 4
    with pytest.raises(DecodeError):
        f.solve(singular, b)


def test_overdetermined_consistent_system() -> None:
    f = galois_field(8)
    A = mds_generator(4, 2, f).G.T  # 4 x 2, any two rows independent
    x = np.array([7, 200], dtype=f.dtype)
    assert np.array_equal(f.solve(A, f.matmul(A, x)[:, 0]), x)


def test_systematic_forms() -> None:
    assert np.array_equal(mds_generator(4, 4).G, np.eye(4))
    G = mds_generator(5, 4).G
    assert np.array_equal(G[:, :4], np.eye(4))
    assert G[:, 4].tolist() == [1, 1, 1, 1]


@pytest.mark.parametrize("chi, nu, bits", [(8, 3, 16), (10, 5, 8), (12, 1, 8), (6, 6, 8), (7, 6, 16)])
def test_generators_are_mds(chi, nu, bits) -> None:
    G = mds_generator(chi, nu, galois_field(bits))
    assert G.G.shape == (nu, chi)
    assert check_mds(G)


def test_randomized_mds_check_on_large_generator() -> None:
    G = mds_generator(40, 12, galois_field(16))
    assert check_mds(G, exhaustive_limit=1000, random_subsets=50, seed=1)


def test_dependent_columns_fail_the_check() -> None:
    f = galois_field(8)
    assert not check_mds(CodingMatrix(np.ones((2, 3)), f))


def test_field_too_small() -> None:
    with pytest.raises(FieldTooSmallError, match="field_bits=16"):
        mds_generator(256, 3, galois_field(8))
    assert mds_generator(256, 3, galois_field(16)).chi == 256


def test_nu_must_not_exceed_chi() -> None:
    with pytest.raises(InvalidInputError):
        mds_generator(3, 4)


def example1_payloads(f, g):
    rng = make_rng(42)
    return {int(pid): f.random(6, rng) for pid in g.packet_ids.tolist()}


def test_example1_codeword_rows(example1_graph) -> None:
    f = galois_field(8)
    g = example1_graph
    out = gclc2(g)
    G = mds_generator(out.num_colors, out.local_number, f)
    payloads = example1_payloads(f, g)
    X = encode(g, out, G, payloads).symbols
    # Packets A1, A2, A0, B0, B1 carry global ids 1, 2, 0, 3, 4
    b1 = payloads[4]
    assert X.shape == (4, 6)
    assert np.array_equal(X[0], payloads[1] ^ b1)
    assert np.array_equal(X[1], payloads[2] ^ b1)
    assert np.array_equal(X[2], payloads[0] ^ b1)
    assert np.array_equal(X[3], payloads[3] ^ b1)


def test_example1_every_user_decodes(example1_graph) -> None:
    f = galois_field(8)
    g = example1_graph
    payloads = example1_payloads(f, g)
    for out in (gclc2(g), gclc(g), hglc(g, seed=0), brute_force_oracle(g)):
        G = mds_generator(out.num_colors, out.local_number, f)
        codeword = encode(g, out, G, payloads)
        assert codeword.nu == out.local_number
        got = {}
        for u in range(3):
            got.update({(u, pid): v for pid, v in decode(u, codeword, G, out, g, payloads).items()})
        assert set(got) == {(0, PacketId(0, 1)), (0, PacketId(0, 2)), (1, PacketId(0, 0)), (1, PacketId(0, 2)),
                            (2, PacketId(1, 0)), (2, PacketId(1, 1))}
        for (u, pid), value in got.items():
            assert np.array_equal(value, payloads[pid.global_id(3)])


def test_round_trip_on_random_instances() -> None:
    for seed in range(60):
        _, g = random_instance(seed)
        for out in (gclc(g), gclc2(g), hglc(g, seed=seed)):
            assert verify_round_trip(g, out, seed=seed) == g.size


def test_round_trip_for_every_coloring_variant() -> None:
    for seed in range(150):
        _, g = random_instance(10_000 + seed, max_n=8, max_m=6, max_B=6)
        variants = (
            gclc1(g),
            gclc1(g, grouping="set"),
            hglc1(g, seed=seed),
            hglc1(g, params=HglcParams(1, 1), seed=seed),
        )
        for out in variants:
            assert verify_round_trip(g, out, seed=seed) == g.size


def test_coloring_that_splits_a_packet_is_rejected(example1_graph) -> None:
    # Vertices 1 and 3 both request A2
    g = example1_graph
    out = ColoringOutcome(Coloring(np.array([0, 1, 0, 2, 1, 2])), 3, Algorithm.HGLC1)
    f = galois_field(8)
    with pytest.raises(InvalidInputError, match="spans colors"):
        encode(g, out, mds_generator(3, 3, f), example1_payloads(f, g))


def test_round_trip_with_oracle_coloring() -> None:
    for seed in range(15):
        _, g = tiny_instance(seed, max_vertices=9)
        assert verify_round_trip(g, brute_force_oracle(g), galois_field(8), seed=seed) == g.size


def test_zero_payloads_give_zero_codeword() -> None:
    _, g = random_instance(5)
    out = gclc(g)
    f = galois_field(16)
    G = mds_generator(out.num_colors, out.local_number, f)
    payloads = {int(pid): np.zeros(4, dtype=f.dtype) for pid in g.packet_ids.tolist()}
    assert not encode(g, out, G, payloads).symbols.any()


def test_codeword_frame(example1_graph) -> None:
    f = galois_field(16)
    out = gclc2(example1_graph)
    G = mds_generator(5, 4, f)
    codeword = encode(example1_graph, out, G, example1_payloads(f, example1_graph))
    data = codeword.to_bytes()
    assert len(data) == 8 + 4 * 6 * 2
    assert data[:8] == (4).to_bytes(4, "little") + (6).to_bytes(4, "little")
    assert np.array_equal(Codeword.from_bytes(data, f).symbols, codeword.symbols)
    with pytest.raises(DimensionMismatchError):
        Codeword.from_bytes(data[:-1], f)


def test_generator_shape_must_match_coloring(example1_graph) -> None:
    out = gclc2(example1_graph)
    payloads = example1_payloads(galois_field(16), example1_graph)
    with pytest.raises(DimensionMismatchError):
        encode(example1_graph, out, mds_generator(5, 3), payloads)


def test_missing_payload(example1_graph) -> None:
    out = gclc2(example1_graph)
    with pytest.raises(InvalidInputError):
        encode(example1_graph, out, mds_generator(5, 4), {0: np.zeros(2)})


def test_mixed_payload_lengths(example1_graph) -> None:
    out = gclc2(example1_graph)
    payloads = {pid: np.zeros(2 if pid else 3, dtype=np.uint16) for pid in range(5)}
    with pytest.raises(DimensionMismatchError):
        encode(example1_graph, out, mds_generator(5, 4), payloads)


def test_decode_checks_user_and_rows(example1_graph) -> None:
    g = example1_graph
    out = gclc2(g)
    f = galois_field(16)
    G = mds_generator(5, 4, f)
    payloads = example1_payloads(f, g)
    codeword = encode(g, out, G, payloads)
    with pytest.raises(InvalidInputError):
        decode(3, codeword, G, out, g, payloads)
    with pytest.raises(DimensionMismatchError):
        decode(0, Codeword(codeword.symbols[:3], f), G, out, g, payloads)


def test_degenerate_generator_fails_to_decode(example1_graph) -> None:
    g = example1_graph
    out = gclc1(g)
    f = galois_field(8)
    G = CodingMatrix(np.ones((3, 4)), f)
    payloads = example1_payloads(f, g)
    codeword = encode(g, out, G, payloads)
    with pytest.raises(DecodeError):
        decode(0, codeword, G, out, g, payloads)
