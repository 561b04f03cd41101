from __future__ import annotations

import itertools

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import (
    annihilation,
    creation,
    fermion_hamiltonian_dense,
    fixture_meta,
    fixture_text,
    generator_dense,
    kron_string,
    pauli_sum_dense,
)
from ucc_forge import ContractError, DimensionError, ParseError, PauliString, PauliSum
from ucc_forge.fermion import (
    C2V,
    D2H,
    ExcitationGenerator,
    ExcitationPool,
    Integrals,
    OrbitalSymmetryMap,
    build_pool_from_orbitals,
    build_pool_generalized,
    build_pool_pair_gsd,
    build_pool_sd,
    encode_generator,
    encode_hamiltonian,
    format_integrals,
    format_pool,
    irrep_product,
    jw_ladder,
    number_operator,
    parse_integrals,
    parse_pool,
    screen_orbital,
    screen_spin,
)

# -- ladder operators ---------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_ladders_match_bitwise_oracle(n):
    for k in range(n):
        np.testing.assert_allclose(pauli_sum_dense(jw_ladder(k, n)), creation(k, n), atol=1e-14)
        np.testing.assert_allclose(
            pauli_sum_dense(jw_ladder(k, n, "annihilation")), annihilation(k, n), atol=1e-14
        )


def test_creation_two_qubits_explicit():
    expected = 0.5 * (kron_string({0: "X", 1: "Z"}, 2) - 1j * kron_string({0: "Y", 1: "Z"}, 2))
    np.testing.assert_allclose(pauli_sum_dense(jw_ladder(0, 2)), expected, atol=1e-15)


def test_car_relations_up_to_eight_modes():
    for n in range(1, 9):
        ident = PauliSum.identity(n)
        for p, q in itertools.product(range(n), repeat=2):
            a_p = jw_ladder(p, n, "annihilation")
            ad_q = jw_ladder(q, n)
            anti = (a_p * ad_q + ad_q * a_p).simplify()
            assert anti == (ident if p == q else PauliSum.zero(n))
            a_q = jw_ladder(q, n, "annihilation")
            assert (a_p * a_q + a_q * a_p).simplify() == PauliSum.zero(n)


def test_ladder_errors():
    with pytest.raises(DimensionError):
        jw_ladder(3, 3)
    with pytest.raises(ValueError):
        jw_ladder(0, 2, "raise")


def test_number_operator():
    n_op = number_operator(3, [1])
    assert n_op == PauliSum.from_text("0.5\n-0.5 Z1", 3)
    total = pauli_sum_dense(number_operator(4))
    np.testing.assert_allclose(np.diag(total).real, [bin(b).count("1") for b in range(16)])


# -- generators ---------------------------------------------------------------------


def test_generator_validation():
    with pytest.raises(ContractError):
        ExcitationGenerator((1, 0), (2, 3))
    with pytest.raises(ContractError):
        ExcitationGenerator((1,), (1,))
    with pytest.raises(ContractError):
        ExcitationGenerator((1, 2), (0,))
    with pytest.raises(DimensionError):
        encode_generator(ExcitationGenerator.single(0, 4), 4)
    assert str(ExcitationGenerator.double(1, 0, 3, 2)) == "0,1->2,3"


DOUBLE_PATTERN = {
    "YXXX": 1,
    "XYXX": 1,
    "XXYX": -1,
    "XXXY": -1,
    "XYYY": -1,
    "YXYY": -1,
    "YYXY": 1,
    "YYYX": 1,
}


@pytest.mark.parametrize("i,j,a,b", [(0, 1, 2, 3), (0, 2, 3, 5), (1, 3, 4, 7), (0, 3, 4, 6)])
def test_double_strings_and_signs(i, j, a, b):
    n = b + 1
    enc = encode_generator(ExcitationGenerator.double(i, j, a, b), n)
    assert len(enc) == 8
    got = {}
    for p, c in enc:
        letters = "".join(p.op(q) for q in (i, j, a, b))
        assert all(p.op(q) == "Z" for q in range(i + 1, j))
        assert all(p.op(q) == "Z" for q in range(a + 1, b))
        assert all(p.op(q) == "I" for q in range(j + 1, a))
        got[letters] = c
    assert got == {k: 1j * s / 8 for k, s in DOUBLE_PATTERN.items()}


def test_adjacent_single_is_yx_minus_xy():
    enc = encode_generator(ExcitationGenerator.single(0, 1), 2)
    expected = PauliSum.from_text("0 0.5 Y0 X1\n0 -0.5 X0 Y1", 2)
    assert enc.allclose(expected)


def _all_doubles(n):
    for occ in itertools.combinations(range(n), 2):
        rest = [k for k in range(n) if k not in occ]
        for virt in itertools.combinations(rest, 2):
            yield ExcitationGenerator(virt, occ)


def test_double_strings_pairwise_commute_all_layouts():
    for n in range(4, 9):
        for g in _all_doubles(n):
            strings = [p for p, _ in encode_generator(g, n)]
            assert len(strings) == 8
            assert all(p.commutes(q) for p, q in itertools.combinations(strings, 2))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(st.just(n), st.permutations(range(n)))))
def test_encoded_generator_matches_ladders(case):
    n, perm = case
    rank = 1 if n < 4 else 1 + perm[-1] % 2
    q = tuple(sorted(perm[:rank]))
    p = tuple(sorted(perm[rank : 2 * rank]))
    enc = encode_generator(ExcitationGenerator(p, q), n)
    assert enc.is_antihermitian()
    assert all(c.real == 0 for _, c in enc)
    np.testing.assert_allclose(pauli_sum_dense(enc), generator_dense(p, q, n), atol=1e-14)


def test_closed_form_exponential():
    rng = np.random.default_rng(7)
    for g in [ExcitationGenerator.single(1, 3), ExcitationGenerator.double(0, 2, 3, 4)]:
        a = pauli_sum_dense(encode_generator(g, 5))
        theta = float(rng.uniform(-np.pi, np.pi))
        x = theta / 2
        closed = np.eye(32) + np.sin(x) * a + (1 - np.cos(x)) * a @ a
        np.testing.assert_allclose(closed, scipy.linalg.expm(x * a), atol=1e-12)
        # 1 + A^2 projects onto the kernel of A
        p_null = np.eye(32) + a @ a
        np.testing.assert_allclose(p_null @ p_null, p_null, atol=1e-12)
        np.testing.assert_allclose(a @ p_null, 0, atol=1e-12)


def test_pair_generator_acts_on_four_modes():
    pool = build_pool_pair_gsd(3)
    pair = [g for g in pool.doubles if g.annihilation == (0, 1)][0]
    a = pauli_sum_dense(encode_generator(pair, 6))
    involved = set(pair.indices)
    for col in np.flatnonzero(np.abs(a).sum(axis=0)):
        for row in np.flatnonzero(np.abs(a[:, col])):
            changed = row ^ col
            assert all(k in involved for k in range(6) if changed >> k & 1)


# -- pools --------------------------------------------------------------------------


def _brute_force_sd(occ, virt):
    out = set()
    for rank in (1, 2):
        for q in itertools.combinations(occ, rank):
            for p in itertools.combinations(virt, rank):
                out.add((p, q))
    return out


@pytest.mark.parametrize("n_occ,n_virt", [(1, 1), (1, 2), (2, 2), (2, 3)])
def test_sd_pool_matches_enumeration(n_occ, n_virt):
    pool = build_pool_sd(n_occ, n_virt)
    occ = range(2 * n_occ)
    virt = range(2 * n_occ, 2 * (n_occ + n_virt))
    assert {(g.creation, g.annihilation) for g in pool} == _brute_force_sd(occ, virt)
    assert len(pool) == len(set(pool))
    ranks = [g.rank for g in pool]
    assert ranks == sorted(ranks, reverse=True)
    singles_first = build_pool_sd(n_occ, n_virt, doubles_first=False)
    assert [g.rank for g in singles_first] == sorted(ranks)


def test_sd_pool_small_cases():
    pool = build_pool_sd(1, 1)
    assert len(pool.singles) == 4 and len(pool.doubles) == 1
    assert build_pool_sd(0, 3).generators == ()
    assert ExcitationGenerator.double(0, 1, 2, 3) in build_pool_sd(1, 1)
    with pytest.raises(ContractError):
        build_pool_sd(1, 0)
    with pytest.raises(ContractError):
        build_pool_from_orbitals([0, 1], [1, 2])


def test_active_space_restriction():
    pool = build_pool_sd(2, 2, active=[2, 3, 4, 5])
    assert all(set(g.indices) <= {2, 3, 4, 5} for g in pool)
    assert len(pool) == len(build_pool_sd(1, 1))


@pytest.mark.parametrize("n_spatial,pairs", [(2, 1), (3, 3), (4, 6)])
def test_pair_gsd_counts(n_spatial, pairs):
    pool = build_pool_pair_gsd(n_spatial)
    assert len(pool.doubles) == pairs
    assert len(pool.singles) == 2 * pairs
    for g in pool.doubles:
        (a, b), (i, j) = g.creation, g.annihilation
        assert (b, j) == (a + 1, i + 1) and a % 2 == 0 and i % 2 == 0


def test_generalized_pool_one_per_rotation():
    pool = build_pool_generalized(5, 2)
    rotations = {frozenset([g.creation, g.annihilation]) for g in pool}
    assert len(rotations) == len(pool) == 15  # C(5,2) C(3,2) / 2
    assert len(build_pool_generalized(4, 1)) == 6


def test_pool_duplicates_rejected():
    g = ExcitationGenerator.single(0, 2)
    with pytest.raises(ContractError):
        ExcitationPool((g, g))


def test_pool_text_round_trip():
    pool = build_pool_sd(2, 2)
    assert parse_pool(format_pool(pool)) == ExcitationPool(pool.generators, "custom")
    parsed = parse_pool("# comment\n1,0 -> 3,2\n\n0->2\n")
    assert parsed.generators == (ExcitationGenerator.double(0, 1, 2, 3), ExcitationGenerator.single(0, 2))


@pytest.mark.parametrize(
    "text,line",
    [("0->2\n0,1->x\n", 2), ("0->1->2\n", 1), ("0->0\n", 1), ("0,1->2\n", 1)],
)
def test_pool_parse_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_pool(text)
    assert info.value.lineno == line


# -- spin and orbital screening -----------------------------------------------------


def _alpha(k):
    return k % 2 == 0


def _brute_spin_ok(p, q):
    return sum(map(_alpha, p)) == sum(map(_alpha, q))


@pytest.mark.parametrize("n_occ,n_virt", [(1, 1), (1, 3), (2, 2), (3, 2), (2, 4)])
def test_spin_screening(n_occ, n_virt):
    pool = build_pool_sd(n_occ, n_virt)
    kept = screen_spin(pool)
    assert 2 * len(kept.singles) == len(pool.singles)
    occ = range(2 * n_occ)
    virt = range(2 * n_occ, 2 * (n_occ + n_virt))
    oracle = {
        (p, q)
        for q in itertools.combinations(occ, 2)
        for p in itertools.combinations(virt, 2)
        if _brute_spin_ok(p, q)
    }
    assert {(g.creation, g.annihilation) for g in kept.doubles} == oracle


def test_spin_flip_single_removed():
    pool = ExcitationPool((ExcitationGenerator.single(0, 3), ExcitationGenerator.single(0, 2)))
    assert screen_spin(pool).generators == (ExcitationGenerator.single(0, 2),)
    assert screen_spin(pool, [0, 1, 0, 0]).generators == pool.generators
    with pytest.raises(ContractError):
        screen_spin(pool, [0, 1, 2, 1])


# Independent Z2^3 encoding of the D2h irreps: products are bitwise xor.
D2H_BITS = {
    "Ag": 0b000,
    "B1g": 0b001,
    "B2g": 0b010,
    "B3g": 0b011,
    "Au": 0b100,
    "B1u": 0b101,
    "B2u": 0b110,
    "B3u": 0b111,
}
C2V_BITS = {"A1": 0b00, "B1": 0b01, "B2": 0b10, "A2": 0b11}


@pytest.mark.parametrize("group,bits", [(D2H, D2H_BITS), (C2V, C2V_BITS)])
def test_product_tables_match_character_oracle(group, bits):
    inverse = {v: k for k, v in bits.items()}
    for a, b in itertools.product(group.irreps, repeat=2):
        assert irrep_product(group, a, b) == inverse[bits[a] ^ bits[b]]
    for a in group.irreps:
        assert irrep_product(group, a, group.identity) == a


def test_printed_table_entries():
    assert irrep_product(C2V, "B1", "B2") == "A2"
    assert irrep_product(D2H, "B1g", "B2g") == "B3g"
    assert D2H.irreps == ("Ag", "Au", "B1g", "B2g", "B3g", "B1u", "B2u", "B3u")
    assert [irrep_product(D2H, "B3u", x) for x in D2H.irreps] == [
        "B3u", "B3g", "B2u", "B1u", "Au", "B2g", "B1g", "Ag",
    ]
    with pytest.raises(ContractError):
        irrep_product(C2V, "A1", "Ag")


def test_pair_irrep_example():
    sym = OrbitalSymmetryMap(("B1", "B2"))
    assert sym.of(C2V, [0, 2]) == "A2"


def _brute_orbital_filter(pool, labels, bits):
    out = set()
    for g in pool:
        lhs = rhs = 0
        for k in g.creation:
            lhs ^= bits[labels[k // 2]]
        for k in g.annihilation:
            rhs ^= bits[labels[k // 2]]
        if lhs == rhs:
            out.add(g)
    return out


def test_orbital_screening_matches_brute_force():
    rng = np.random.default_rng(11)
    names = list(D2H_BITS)
    for _ in range(20):
        n_occ, n_virt = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        labels = tuple(names[int(i)] for i in rng.integers(0, 8, n_occ + n_virt))
        pool = screen_spin(build_pool_sd(n_occ, n_virt))
        kept = screen_orbital(pool, OrbitalSymmetryMap(labels), D2H)
        assert set(kept) == _brute_orbital_filter(pool, labels, D2H_BITS)
        assert [g for g in pool if g in set(kept)] == list(kept)


def test_orbital_screening_trivial_and_errors():
    pool = build_pool_sd(2, 2)
    assert screen_orbital(pool, OrbitalSymmetryMap(("A1",) * 4), C2V) == pool
    with pytest.raises(ContractError):
        screen_orbital(pool, OrbitalSymmetryMap(("A1", "Q", "A1", "A1")), C2V)
    with pytest.raises(ContractError):
        screen_orbital(pool, OrbitalSymmetryMap(("A1",) * 3), C2V)


# -- Hamiltonians and files ---------------------------------------------------------


def test_number_operator_from_tables():
    h = encode_hamiltonian({(2, 2): 1.0}, None, 3)
    assert h == PauliSum.from_text("0.5\n-0.5 Z2", 3)
    assert encode_hamiltonian(None, None, 3) == PauliSum.zero(3)


def test_hopping_spectrum():
    t = 0.7
    h = encode_hamiltonian({(0, 1): t, (1, 0): t}, None, 2)
    np.testing.assert_allclose(np.linalg.eigvalsh(pauli_sum_dense(h)), [-t, 0, 0, t], atol=1e-14)


def test_random_hamiltonian_matches_ladders():
    rng = np.random.default_rng(3)
    n = 4
    one, two = {}, {}
    for p, q in itertools.product(range(n), repeat=2):
        if p <= q:
            v = float(rng.normal())
            one[(p, q)] = v
            one[(q, p)] = v
    for _ in range(12):
        key = tuple(int(v) for v in rng.integers(0, n, 4))
        v = float(rng.normal())
        for k in {key, key[::-1]}:
            two[k] = two.get(k, 0.0) + v
    h = encode_hamiltonian(one, two, n, 0.25)
    dense = fermion_hamiltonian_dense(0.25, one, two, n)
    np.testing.assert_allclose(pauli_sum_dense(h), dense, atol=1e-12)


def test_non_hermitian_tables_rejected():
    with pytest.raises(ContractError):
        encode_hamiltonian({(0, 1): 1.0}, None, 2)
    with pytest.raises(DimensionError):
        encode_hamiltonian({(0, 2): 1.0, (2, 0): 1.0}, None, 2)


@pytest.mark.parametrize("name", ["h2_sto3g", "h2_631g"])
def test_fixture_fci(name):
    ints = parse_integrals(fixture_text(f"{name}.int"))
    meta = fixture_meta(f"{name}.json")
    assert ints.n_orbitals == meta["n_spin_orbitals"]
    h = ints.to_pauli()
    assert h.is_hermitian()
    n_el = meta["n_electrons"]
    dense = pauli_sum_dense(h)
    sector = [b for b in range(1 << h.n_qubits) if bin(b).count("1") == n_el]
    e_fci = np.linalg.eigvalsh(dense[np.ix_(sector, sector)])[0]
    assert abs(e_fci - meta["e_fci"]) < 1e-8
    e_hf = dense[(1 << n_el) - 1, (1 << n_el) - 1].real
    assert abs(e_hf - meta["e_hf"]) < 1e-8


def test_integrals_round_trip():
    ints = parse_integrals(fixture_text("h2_sto3g.int"))
    again = parse_integrals(format_integrals(ints))
    assert again == ints
    assert parse_integrals("norb 2\n1 0 0 0.5\n1 0 0 0.25\n").one_body == {(0, 0): 0.75}
    assert isinstance(again, Integrals)


@pytest.mark.parametrize(
    "text,line",
    [
        ("1 0 0 1.0\n", 1),
        ("norb 2\n1 0 0\n", 2),
        ("norb 2\n\n2 0 1 1 5 0.1\n", 3),
        ("norb 2\nnorb 3\n", 2),
        ("norb 2\n1 0 a 1.0\n", 2),
        ("norb 0\n", 1),
    ],
)
def test_integrals_parse_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_integrals(text)
    assert info.value.lineno == line


def test_missing_header():
    with pytest.raises(ParseError):
        parse_integrals("# nothing\n")


def test_encoded_hamiltonian_coefficients_real():
    h = parse_integrals(fixture_text("h2_sto3g.int")).to_pauli()
    assert all(isinstance(c, (float, complex)) and abs(complex(c).imag) == 0 for _, c in h)
    assert h.coefficient(PauliString.identity(4)).real == pytest.approx(
        h.constant().real, abs=0
    )
