"""Qubit coupled cluster: entangler screening, Hamiltonian dressing and exchange gates."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence

import numpy as np

from ..circuit import Circuit, synthesize_pauli_evolution
from ..exceptions import ContractError, DimensionError
from ..fermion import ExcitationGenerator, encode_generator
from ..pauli import PauliString, PauliSum, apply_string, dress

SCREEN_TIE_DECIMALS = 12


def _occupied(mask: int, n: int) -> list[int]:
    return [q for q in range(n) if mask >> q & 1]


def default_qcc_candidates(reference: int, n_qubits: int) -> list[PauliString]:
    """Distinct Pauli strings in the JW images of all occupied-to-virtual doubles.

    Each such string has X or Y on exactly four qubits, at least two of them X.
    """
    occ = _occupied(reference, n_qubits)
    virt = [q for q in range(n_qubits) if not reference >> q & 1]
    seen: dict[tuple[int, int], PauliString] = {}
    for ai, i in enumerate(occ):
        for j in occ[ai + 1 :]:
            for av, a in enumerate(virt):
                for b in virt[av + 1 :]:
                    gen = encode_generator(ExcitationGenerator((a, b), (i, j)), n_qubits)
                    for p, _ in gen:
                        seen.setdefault(p.key, p)
    return [seen[k] for k in sorted(seen)]


def qcc_gradient(h: PauliSum, reference: int, p: PauliString) -> float:
    """``i <ref|[H, P]|ref>``, the slope at zero of ``<ref|e^{i t P/2} H e^{-i t P/2}|ref>`` times two."""
    n = h.n_qubits
    ref = np.zeros(1 << n, dtype=complex)
    ref[reference] = 1.0
    hp = np.vdot(h.apply(ref), apply_string(p, ref))
    # i(<H P> - <P H>) = i (z - conj z) = -2 Im z with z = <ref|H P|ref>
    return float(-2.0 * hp.imag)


def qcc_screen(
    h: PauliSum,
    reference: int,
    candidates: Iterable[PauliString] | None = None,
) -> list[tuple[PauliString, float]]:
    """Rank candidate entanglers by ``|i <ref|[H, P]|ref>|``.

    The energy of ``exp(-i t P/2)|ref>`` has slope ``-value/2`` at ``t = 0``.

    Args:
        h: Hermitian Hamiltonian.
        reference: Occupation bitmask of the mean-field determinant.
        candidates: Pauli strings to screen; defaults to
            :func:`default_qcc_candidates`.

    Returns:
        ``(string, magnitude)`` pairs, largest first; equal magnitudes (to 12
        decimals) keep canonical ``(x, z)`` order.

    Raises:
        ContractError: empty candidate set or non-Hermitian ``h``.
        DimensionError: a candidate does not fit the register.
    """
    n = h.n_qubits
    if not h.is_hermitian():
        raise ContractError("qcc_screen requires a Hermitian Hamiltonian")
    if not 0 <= reference < 1 << n:
        raise DimensionError("reference does not fit the register")
    cands = default_qcc_candidates(reference, n) if candidates is None else list(candidates)
    if not cands:
        raise ContractError("no candidate entanglers to screen")
    scored = []
    for p in cands:
        if p.n_qubits != n:
            raise DimensionError(f"candidate {p} does not fit {n} qubits")
        scored.append((p, abs(qcc_gradient(h, reference, p))))
    scored.sort(key=lambda item: (-round(item[1], SCREEN_TIE_DECIMALS), item[0].sort_key()))
    return scored


def iqcc_step(h: PauliSum, chosen: Sequence[tuple[PauliString, float]]) -> PauliSum:
    """Fold optimized entanglers into the Hamiltonian.

    With ``U = U_m ... U_1`` and ``U_k = exp(-i t_k P_k / 2)`` (``U_1`` applied
    first), returns ``U^dag H U`` built by dressing with ``P_m`` first.
    """
    out = h
    for p, theta in reversed(list(chosen)):
        out = dress(out, p, float(theta))
    return out


def exchange_generator(i: int, a: int, n_qubits: int) -> PauliSum:
    """``(X_a Y_i - Y_a X_i) / 2`` for the exchange gate between qubits ``i`` and ``a``."""
    if i == a or not (0 <= i < n_qubits and 0 <= a < n_qubits):
        raise ContractError("exchange gate needs two distinct qubits in range")
    xy = PauliString.from_ops(n_qubits, {a: "X", i: "Y"})
    yx = PauliString.from_ops(n_qubits, {a: "Y", i: "X"})
    return PauliSum.from_terms(n_qubits, [(xy, 0.5), (yx, -0.5)])


def exchange_gate_matrix(theta: float) -> np.ndarray:
    """Block of the exchange gate on the one-electron kets ``|n_i n_a> = (|01>, |10>)``.

    The first ket has ``a`` occupied and the second has ``i`` occupied, so the
    full gate in the ``|n_i n_a>`` product basis is ``diag(1, block, 1)``.
    """
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def exchange_gate(i: int, a: int, theta: float, n_qubits: int) -> Circuit:
    """Circuit for ``exp(-i theta (X_a Y_i - Y_a X_i) / 2)``.

    This mixes the singly occupied kets as ``|i> -> cos(theta)|i> - sin(theta)|a>``
    and ``|a> -> cos(theta)|a> + sin(theta)|i>``, matching :func:`exchange_gate_matrix`.
    Both terms commute, so the circuit is two Pauli rotations of angle ``+-theta``.
    """
    xy = PauliString.from_ops(n_qubits, {a: "X", i: "Y"})
    yx = PauliString.from_ops(n_qubits, {a: "Y", i: "X"})
    return synthesize_pauli_evolution(xy, theta).compose(synthesize_pauli_evolution(yx, -theta))


def mean_field_rotation(pairs: Sequence[tuple[int, int, float]], n_qubits: int) -> Circuit:
    """Product of exchange gates, one per ``(i, a, theta)``."""
    out = Circuit(n_qubits)
    for i, a, theta in pairs:
        out = out.compose(exchange_gate(i, a, theta, n_qubits))
    return out


__all__ = [
    "default_qcc_candidates",
    "exchange_gate",
    "exchange_gate_matrix",
    "exchange_generator",
    "iqcc_step",
    "mean_field_rotation",
    "qcc_gradient",
    "qcc_screen",
]
