from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import circuit_dense, generator_dense, pauli_string_dense, random_circuit
from ucc_forge import (
    Circuit,
    ContractError,
    DegenerateInputError,
    DimensionError,
    Gate,
    ParamRef,
    ParseError,
    PauliString,
    UnboundParameterError,
)
from ucc_forge.circuit import (
    build_reference,
    generator_rotations,
    occupation_mask,
    parse_circuit,
    synthesize_generator_naive,
    synthesize_pauli_evolution,
)
from ucc_forge.fermion import ExcitationGenerator


def test_gate_validation():
    with pytest.raises(ContractError):
        Gate("CX", (1, 1))
    with pytest.raises(ContractError):
        Gate("Rz", (0,))
    with pytest.raises(ContractError):
        Gate("H", (0,), 0.1)
    with pytest.raises(ContractError):
        Gate("T", (0,))
    with pytest.raises(ContractError):
        Gate("H", (0, 1))
    with pytest.raises(DimensionError):
        Circuit(2, (Gate("CX", (0, 2)),))


def test_param_ref_arithmetic():
    p = ParamRef("theta")
    assert (0.5 * p).multiplier == 0.5
    assert (-p / 4).multiplier == -0.25
    assert (p * 2).value({"theta": 0.3}) == pytest.approx(0.6)
    with pytest.raises(UnboundParameterError):
        p.value({})
    with pytest.raises(ValueError):
        ParamRef("1bad")


def test_bind_by_name_and_sequence():
    c = Circuit(1, (Gate("Rz", (0,), "a"), Gate("Rx", (0,), ParamRef("b", -2.0))))
    assert c.parameters == ("a", "b")
    assert not c.is_bound
    by_seq = c.bind([0.1, 0.2])
    assert by_seq.is_bound and by_seq.gates[1].angle == pytest.approx(-0.4)
    assert by_seq == c.bind({"a": 0.1, "b": 0.2})
    partial = c.bind({"a": 0.1}, strict=False)
    assert partial.parameters == ("b",)
    with pytest.raises(UnboundParameterError):
        c.bind({"a": 0.1})
    with pytest.raises(DimensionError):
        c.bind([0.1])


def test_inverse_and_counts():
    rng = np.random.default_rng(5)
    c = random_circuit(rng, 3, 30)
    u = circuit_dense(c)
    np.testing.assert_allclose(circuit_dense(c.inverse()) @ u, np.eye(8), atol=1e-12)
    ops = c.count_ops()
    assert sum(ops.values()) == len(c)
    assert c.two_qubit_count() == ops.get("CX", 0) + ops.get("CZ", 0)


def test_depth():
    c = Circuit(3, (Gate("H", (0,)), Gate("H", (1,)), Gate("CX", (0, 1)), Gate("X", (2,))))
    assert c.depth() == 2
    assert Circuit(2).depth() == 0


def test_compose_checks_size():
    with pytest.raises(DimensionError):
        Circuit(2).compose(Circuit(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_text_round_trip(seed):
    rng = np.random.default_rng(seed)
    c = random_circuit(rng, int(rng.integers(1, 5)), int(rng.integers(0, 20)), symbolic=bool(seed % 2))
    assert parse_circuit(c.to_text()) == c


def test_text_format_example():
    c = Circuit(2, (Gate("H", (0,)), Gate("CX", (0, 1)), Gate("Rz", (1,), ParamRef("t", 0.5))))
    assert c.to_text() == "qubits 2\nparams t\nh 0\ncx 0,1\nrz 1 0.5*t\n"
    assert parse_circuit("qubits 1\nrz 0 -t\n").gates[0].angle == ParamRef("t", -1.0)


@pytest.mark.parametrize(
    "text,line",
    [
        ("h 0\n", 1),
        ("qubits 2\nfoo 0\n", 2),
        ("qubits 2\ncx 0\n", 2),
        ("qubits 2\nh 5\n", 2),
        ("qubits 2\n\nrz 0 1x\n", 3),
        ("qubits 2\nrz 0\n", 2),
        ("qubits x\n", 1),
    ],
)
def test_parse_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_circuit(text)
    assert info.value.lineno == line


def test_qasm_emission():
    c = Circuit(2, (Gate("H", (0,)), Gate("CX", (0, 1)), Gate("Rz", (1,), 0.25), Gate("Sdg", (0,))))
    assert c.to_qasm() == (
        'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\n'
        "h q[0];\ncx q[0],q[1];\nrz(0.25) q[1];\nsdg q[0];\n"
    )
    with pytest.raises(UnboundParameterError):
        Circuit(1, (Gate("Rz", (0,), "t"),)).to_qasm()


def test_zz_evolution_layout():
    c = synthesize_pauli_evolution(PauliString.from_str("Z0 Z1"), 0.3)
    assert [g.to_text() for g in c] == ["cx 0,1", "rz 1 0.3", "cx 0,1"]
    assert c.two_qubit_count() == 2


def test_xzzz_evolution_layout():
    c = synthesize_pauli_evolution(PauliString.from_str("X0 Z1 Z2 Z3"), "t")
    kinds = [g.to_text() for g in c]
    assert kinds == [
        "h 0", "cx 0,1", "cx 1,2", "cx 2,3", "rz 3 t", "cx 2,3", "cx 1,2", "cx 0,1", "h 0",
    ]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(0, 2**n - 1), st.integers(0, 2**n - 1),
    st.floats(-6, 6, allow_nan=False),
)))
def test_pauli_evolution_matches_expm(case):
    n, x, z, theta = case
    p = PauliString(n, x, z)
    if p.is_identity():
        with pytest.raises(DegenerateInputError):
            synthesize_pauli_evolution(p, theta)
        return
    c = synthesize_pauli_evolution(p, theta)
    expected = scipy.linalg.expm(-0.5j * theta * pauli_string_dense(p))
    np.testing.assert_allclose(circuit_dense(c), expected, atol=1e-10)
    assert c.two_qubit_count() == 2 * (p.weight - 1)


def test_evolution_rejects_phase():
    with pytest.raises(ContractError):
        synthesize_pauli_evolution(PauliString.from_str("X0").with_phase(2), 0.1)


@pytest.mark.parametrize(
    "g,n",
    [
        (ExcitationGenerator.single(0, 1), 2),
        (ExcitationGenerator.single(1, 4), 5),
        (ExcitationGenerator.double(0, 1, 2, 3), 4),
        (ExcitationGenerator.double(0, 2, 3, 5), 6),
        (ExcitationGenerator((1, 4), (0, 3)), 5),
    ],
)
def test_naive_generator_matches_closed_form(g, n):
    rng = np.random.default_rng(n)
    theta = float(rng.uniform(-3, 3))
    a = generator_dense(g.creation, g.annihilation, n)
    x = theta / 2
    closed = np.eye(1 << n) + np.sin(x) * a + (1 - np.cos(x)) * a @ a
    c = synthesize_generator_naive(g, theta, n)
    np.testing.assert_allclose(circuit_dense(c), closed, atol=1e-10)
    sym = synthesize_generator_naive(g, "theta", n)
    assert sym.parameters == ("theta",)
    np.testing.assert_allclose(circuit_dense(sym.bind({"theta": theta})), closed, atol=1e-10)


def test_h2_double_blocks():
    g = ExcitationGenerator.double(0, 1, 2, 3)
    rotations = generator_rotations(g, 4)
    assert len(rotations) == 8
    assert {str(p) for p, _ in rotations} >= {"X0 Y1 Y2 Y3"}
    assert all(abs(abs(m) - 0.125) < 1e-15 for _, m in rotations)
    c = synthesize_generator_naive(g, 0.0, 4)
    np.testing.assert_allclose(circuit_dense(c), np.eye(16), atol=1e-14)
    assert c.two_qubit_count() == 48


@pytest.mark.parametrize("L", range(0, 5))
def test_naive_singles_block_count(L):
    # the four singles among i < ibar < a < abar with L modes between ibar and a
    i, ibar, a, abar = 0, 1, 2 + L, 3 + L
    gens = [(i, a), (ibar, abar), (i, abar), (ibar, a)]
    total = sum(
        synthesize_generator_naive(ExcitationGenerator.single(p, q), 0.1, abar + 1).two_qubit_count()
        for p, q in gens
    )
    assert total == 32 + 16 * L


def test_reference_preparation():
    c = build_reference([0, 1], 4)
    psi = circuit_dense(c)[:, 0]
    assert np.argmax(np.abs(psi)) == 0b0011
    assert build_reference(0b0011, 4) == c
    assert len(build_reference([], 3)) == 0
    assert occupation_mask([0, 3]) == 9
    with pytest.raises(DimensionError):
        build_reference([4], 4)
    with pytest.raises(DimensionError):
        build_reference(16, 4)


def test_rotation_conventions():
    theta = 0.7
    rz = circuit_dense(Circuit(1, (Gate("Rz", (0,), theta),)))
    np.testing.assert_allclose(rz, np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]))
    ry = circuit_dense(Circuit(1, (Gate("Ry", (0,), math.pi),)))
    np.testing.assert_allclose(ry @ [1, 0], [0, 1], atol=1e-15)
