"""Quantum phase estimation with exact dense controlled propagators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..circuit import Circuit
from ..exceptions import ContractError, DimensionError, SizeLimitError
from ..pauli import PauliSum
from ..sim import DENSE_QUBIT_CAP, STATE_QUBIT_CAP, apply_circuit, zero_state

DEFAULT_TIME = math.pi
SPECTRUM_TOL = 1e-9
PROB_FLOOR = 1e-15


@dataclass
class QpeOutcome:
    """Exact outcome distribution of the energy register.

    Attributes:
        distribution: Probability per ``m``-bit outcome string (most significant bit first).
        shift: Energy offset subtracted before scaling.
        scale: Factor applied after the shift; the register reads ``(E - shift) * scale``.
        time: Evolution time ``t`` of ``exp(-i H t)``.
        bits: Register size ``m``.
    """

    distribution: dict[str, float]
    shift: float
    scale: float
    time: float
    bits: int

    def probability(self, outcome: int | str) -> float:
        key = outcome if isinstance(outcome, str) else format(outcome, f"0{self.bits}b")
        return self.distribution.get(key, 0.0)

    def most_likely(self) -> str:
        return max(self.distribution, key=lambda k: (self.distribution[k], -int(k, 2)))

    def decode(self, outcome: int | str) -> float:
        """Physical energy represented by an outcome.

        The phase is ``-E' t / (2 pi) mod 1`` for the mapped energy ``E'``, so
        ``E' = ((-b / 2**m) mod 1) * 2 pi / t``.
        """
        b = int(outcome, 2) if isinstance(outcome, str) else int(outcome)
        mapped = ((-b / 2**self.bits) % 1.0) * 2 * math.pi / self.time
        return mapped / self.scale + self.shift


def _inverse_qft(m: int) -> np.ndarray:
    dim = 1 << m
    k = np.arange(dim)
    return np.exp(-2j * math.pi * np.outer(k, k) / dim) / math.sqrt(dim)


def qpe_run(
    h: PauliSum,
    trial: Circuit,
    m: int,
    time_scale: float = DEFAULT_TIME,
    *,
    shift: float = 0.0,
    scale: float = 1.0,
) -> QpeOutcome:
    """Phase estimation of ``exp(-i H' t)`` with ``H' = (H - shift) * scale``.

    The energy register is put in uniform superposition, energy qubit ``k``
    controls ``U^(2^k)`` on the system prepared by ``trial`` from ``|0...0>``,
    and an inverse Fourier transform is applied. The returned distribution
    is exact, with probabilities below ``1e-15`` reported as zero.

    With the default ``t = pi`` every eigenvalue of ``H'`` in the closed
    interval ``[0, 1]`` maps to a distinct phase in ``(-1/2, 0]`` mod 1.

    Raises:
        ContractError: an eigenvalue of ``H'`` lies outside ``[0, 1]``, or
            ``m < 1``, or ``t <= 0``.
        DimensionError: ``trial`` and ``h`` disagree on the qubit count.
        SizeLimitError: registers exceed the simulator caps.
    """
    n = h.n_qubits
    if trial.n_qubits != n:
        raise DimensionError(f"trial circuit has {trial.n_qubits} qubits, Hamiltonian {n}")
    if m < 1 or time_scale <= 0 or scale <= 0:
        raise ContractError("need at least one energy bit and positive time and scale")
    if n > DENSE_QUBIT_CAP or n + m > STATE_QUBIT_CAP:
        raise SizeLimitError(f"{n}+{m} qubits exceed the phase-estimation caps")
    if not h.is_hermitian():
        raise ContractError("phase estimation requires a Hermitian Hamiltonian")
    w, v = np.linalg.eigh(h.to_matrix())
    mapped = (w - shift) * scale
    if mapped.min() < -SPECTRUM_TOL or mapped.max() > 1 + SPECTRUM_TOL:
        raise ContractError(
            f"mapped spectrum [{mapped.min():.6g}, {mapped.max():.6g}] is outside [0, 1]"
        )
    phi = apply_circuit(zero_state(n), trial)
    dim = 1 << m
    # register state is (energy index j, system amplitudes); Hadamards give a uniform row set
    state = np.tile(phi, (dim, 1)) / math.sqrt(dim)
    base = (v * np.exp(-1j * time_scale * mapped)) @ v.conj().T
    power = base
    rows = np.arange(dim)
    for k in range(m):
        sel = (rows >> k) & 1 == 1
        state[sel] = state[sel] @ power.T
        power = power @ power
    state = _inverse_qft(m) @ state
    probs = np.sum(np.abs(state) ** 2, axis=1)
    # exact zeros come out as round-off of order 1e-32; report them as zero
    probs[probs < PROB_FLOOR] = 0.0
    dist = {format(b, f"0{m}b"): float(probs[b]) for b in range(dim)}
    return QpeOutcome(dist, float(shift), float(scale), float(time_scale), m)
