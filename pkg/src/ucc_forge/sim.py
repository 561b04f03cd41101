"""Dense statevector simulation and exact linear-algebra oracles.

Amplitude index ``b = sum_q b_q 2**q``: qubit 0 is the least significant bit,
which is the rightmost label of the ket ``|q_{n-1} ... q_1 q_0>``.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate
from .exceptions import ContractError, DimensionError, SizeLimitError
from .pauli import PauliString, PauliSum, apply_string

DENSE_QUBIT_CAP = 12
STATE_QUBIT_CAP = 24

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_FIXED = {
    "H": _H,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "Sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
}


def gate_matrix(gate: Gate) -> np.ndarray:
    """2x2 matrix of a one-qubit gate, or 4x4 of a two-qubit gate.

    Two-qubit matrices use the basis ``|q0 q1>`` with ``q0 = gate.qubits[0]``
    as the most significant bit.
    """
    kind = gate.kind
    if kind in _FIXED:
        return _FIXED[kind].copy()
    if kind in ("Rx", "Ry", "Rz"):
        t = gate.numeric_angle()
        c, s = math.cos(t / 2), math.sin(t / 2)
        if kind == "Rx":
            return np.array([[c, -1j * s], [-1j * s, c]])
        if kind == "Ry":
            return np.array([[c, -s], [s, c]], dtype=complex)
        return np.diag([complex(c, -s), complex(c, s)])
    if kind == "CX":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    return np.diag([1, 1, 1, -1]).astype(complex)


def _n_from_dim(dim: int) -> int:
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise DimensionError(f"length {dim} is not a power of two")
    return n


def _apply_1q(psi: np.ndarray, n: int, q: int, m: np.ndarray) -> None:
    view = psi.reshape(1 << (n - q - 1), 2, 1 << q, -1)
    a0 = view[:, 0].copy()
    a1 = view[:, 1]
    view[:, 0] = m[0, 0] * a0 + m[0, 1] * a1
    view[:, 1] = m[1, 0] * a0 + m[1, 1] * a1


def _apply_gate_inplace(psi: np.ndarray, n: int, gate: Gate) -> None:
    kind = gate.kind
    if kind == "CX":
        c, t = gate.qubits
        idx = _indices(n)
        sel = idx[((idx >> c) & 1 == 1) & ((idx >> t) & 1 == 0)]
        partner = sel | (1 << t)
        tmp = psi[sel].copy()
        psi[sel] = psi[partner]
        psi[partner] = tmp
    elif kind == "CZ":
        a, b = gate.qubits
        idx = _indices(n)
        sel = idx[((idx >> a) & 1 == 1) & ((idx >> b) & 1 == 1)]
        psi[sel] *= -1
    elif kind == "Rz":
        t = gate.numeric_angle()
        q = gate.qubits[0]
        view = psi.reshape(1 << (n - q - 1), 2, 1 << q, -1)
        view[:, 0] *= complex(math.cos(t / 2), -math.sin(t / 2))
        view[:, 1] *= complex(math.cos(t / 2), math.sin(t / 2))
    else:
        _apply_1q(psi, n, gate.qubits[0], gate_matrix(gate))


_INDEX_CACHE: dict[int, np.ndarray] = {}


def _indices(n: int) -> np.ndarray:
    idx = _INDEX_CACHE.get(n)
    if idx is None:
        idx = np.arange(1 << n, dtype=np.int64)
        _INDEX_CACHE[n] = idx
    return idx


def _amplitudes(state) -> np.ndarray:
    return state.amplitudes if isinstance(state, StateVector) else np.asarray(state)


def apply_circuit(state, circuit: Circuit, bindings: Mapping[str, float] | Sequence[float] | None = None):
    """Apply a bound circuit to a state (or to every column of a matrix).

    Accepts a :class:`StateVector` (returns one) or an array of shape
    ``(2**n,)`` or ``(2**n, k)`` (returns an array).

    Raises:
        UnboundParameterError: a gate angle is symbolic and unbound.
        DimensionError: the state does not live on ``circuit.n_qubits`` qubits.
    """
    if bindings is not None:
        circuit = circuit.bind(bindings)
    amps = _amplitudes(state)
    n = circuit.n_qubits
    if amps.shape[0] != 1 << n:
        raise DimensionError(f"state of length {amps.shape[0]} vs {n}-qubit circuit")
    if n > STATE_QUBIT_CAP:
        raise SizeLimitError(f"statevector path is capped at {STATE_QUBIT_CAP} qubits")
    psi = np.array(amps, dtype=complex, copy=True)
    # angles are resolved up front so an unbound circuit fails before any work
    for g in circuit.gates:
        if g.is_symbolic:
            g.numeric_angle()
    for g in circuit.gates:
        _apply_gate_inplace(psi, n, g)
    if isinstance(state, StateVector):
        return StateVector(psi)
    return psi


def zero_state(n: int) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    return psi


def basis_state(n: int, occupied: int) -> np.ndarray:
    """Computational basis state with bit ``q`` of ``occupied`` set on qubit ``q``."""
    if not 0 <= occupied < 1 << n:
        raise DimensionError(f"mask does not fit {n} qubits")
    psi = np.zeros(1 << n, dtype=complex)
    psi[occupied] = 1.0
    return psi


@dataclass
class StateVector:
    """Normalized ``2**n`` amplitude vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.ndim != 1:
            raise DimensionError("amplitudes must be one-dimensional")
        self.n_qubits = _n_from_dim(self.amplitudes.shape[0])

    @classmethod
    def zero(cls, n: int) -> StateVector:
        return cls(zero_state(n))

    @classmethod
    def basis(cls, n: int, occupied: int) -> StateVector:
        return cls(basis_state(n, occupied))

    def apply(self, circuit: Circuit, bindings=None) -> StateVector:
        return apply_circuit(self, circuit, bindings)

    def expectation(self, h: PauliSum) -> float:
        return expectation(self, h)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def expectation(state, h: PauliSum) -> float:
    """``<psi|H|psi>`` for Hermitian ``H``.

    Raises:
        ContractError: ``h`` is not Hermitian.
    """
    if not h.is_hermitian():
        raise ContractError("expectation requires a Hermitian operator")
    psi = _amplitudes(state)
    val = np.vdot(psi, h.apply(psi))
    return float(val.real)


def transition_amplitude(
    bra_occ: int, c: Circuit, h: PauliSum, n: int | None = None, *, reference: int = 0
) -> complex:
    """``<Phi_bra| U^dag H U |Phi_ref>`` with ``U`` the unitary of ``c``.

    ``U`` is applied to the reference determinant, then ``H``, then ``U^dag``,
    and the result is projected on the bra determinant. ``c`` should not
    contain the reference preparation.

    Raises:
        DimensionError: circuit, operator and ``n`` disagree, or a mask does not fit.
        UnboundParameterError: ``c`` has unbound parameters.
    """
    n = c.n_qubits if n is None else n
    if n != c.n_qubits or h.n_qubits != n:
        raise DimensionError("circuit, operator and qubit count disagree")
    if not 0 <= bra_occ < 1 << n:
        raise DimensionError(f"bra mask does not fit {n} qubits")
    psi = apply_circuit(basis_state(n, reference), c)
    w = apply_circuit(h.apply(psi), c.inverse())
    return complex(w[bra_occ])


def circuit_to_unitary(c: Circuit) -> np.ndarray:
    """Dense unitary whose column ``b`` is the circuit image of ``|b>``.

    Raises:
        SizeLimitError: more than 12 qubits.
    """
    if c.n_qubits > DENSE_QUBIT_CAP:
        raise SizeLimitError(f"dense unitaries are capped at {DENSE_QUBIT_CAP} qubits")
    return apply_circuit(np.eye(1 << c.n_qubits, dtype=complex), c)


def exact_ground_state(h: PauliSum) -> tuple[float, np.ndarray]:
    """Lowest eigenvalue and eigenvector by dense Hermitian diagonalization.

    Raises:
        SizeLimitError: more than 12 qubits.
        ContractError: ``h`` is not Hermitian.
    """
    if h.n_qubits > DENSE_QUBIT_CAP:
        raise SizeLimitError(f"dense diagonalization is capped at {DENSE_QUBIT_CAP} qubits")
    if not h.is_hermitian():
        raise ContractError("ground state requires a Hermitian operator")
    w, v = np.linalg.eigh(h.to_matrix())
    return float(w[0]), v[:, 0]


def spectrum(h: PauliSum) -> np.ndarray:
    if h.n_qubits > DENSE_QUBIT_CAP:
        raise SizeLimitError(f"dense diagonalization is capped at {DENSE_QUBIT_CAP} qubits")
    return np.linalg.eigvalsh(h.to_matrix())


def equivalent_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-10) -> bool:
    """True iff ``||u - exp(i phi) v||_F <= tol`` with ``phi`` fixed by the largest entry of ``v``.

    Raises:
        DimensionError: shapes differ.
        ContractError: an input is not unitary (to ``1e-8``).
    """
    return phase_distance(u, v) <= tol


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionError("operands must be square matrices of equal size")
    eye = np.eye(u.shape[0])
    for m in (u, v):
        if np.linalg.norm(m.conj().T @ m - eye) > 1e-8:
            raise ContractError("operand is not unitary")
    k = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    ratio = u[k] / v[k]
    phase = ratio / abs(ratio) if abs(ratio) > 0 else 1.0
    return float(np.linalg.norm(u - phase * v))


def apply_pauli_rotation(state: np.ndarray, p: PauliString, theta: float) -> np.ndarray:
    """``exp(-i theta/2 P) |state>`` for a Hermitian string ``P``."""
    return math.cos(theta / 2) * state - 1j * math.sin(theta / 2) * apply_string(p, state)


def expm_hermitian(h: PauliSum, t: float) -> np.ndarray:
    """Dense ``exp(-i t H)`` by eigendecomposition."""
    if h.n_qubits > DENSE_QUBIT_CAP:
        raise SizeLimitError(f"dense propagators are capped at {DENSE_QUBIT_CAP} qubits")
    w, v = np.linalg.eigh(h.to_matrix())
    return (v * np.exp(-1j * t * w)) @ v.conj().T
