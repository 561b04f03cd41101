"""Trotterized UCC-type ansatz assembly and fast operator-level state evaluation."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..circuit import Circuit, ParamRef, build_reference, synthesize_generator_naive
from ..circuit import synthesize_pauli_evolution
from ..exceptions import ContractError, DimensionError
from ..fermion import ExcitationGenerator, ExcitationPool, encode_generator
from ..pauli import PauliString, PauliSum, apply_string
from ..tableau import compile_generator_tableau

ORDERINGS = ("doubles-first", "as-given", "random")
STRATEGIES = ("naive", "tableau")


def sparse_operator(h: PauliSum) -> sp.csr_matrix:
    """Sparse ``2**n x 2**n`` matrix of a Pauli sum (internal solver helper)."""
    dim = 1 << h.n_qubits
    cols = np.arange(dim, dtype=np.int64)
    rows_all, cols_all, vals_all = [], [], []
    for p, c in h:
        parity = np.zeros(dim, dtype=np.int64)
        zb = cols & p.z
        for q in range(h.n_qubits):
            if p.z >> q & 1:
                parity ^= (zb >> q) & 1
        vals = c * (1j ** (p.y_count % 4)) * (1 - 2 * parity)
        rows_all.append(cols ^ p.x)
        cols_all.append(cols)
        vals_all.append(vals)
    if not rows_all:
        return sp.csr_matrix((dim, dim), dtype=complex)
    m = sp.coo_matrix(
        (np.concatenate(vals_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(dim, dim),
    )
    return m.tocsr()


def order_pool(pool: ExcitationPool, ordering: str = "doubles-first", seed: int | None = None) -> list:
    """Generators in application order.

    ``doubles-first`` is a stable sort by decreasing rank (qubit strings count
    as rank 0 and go last); ``random`` is a seeded permutation.
    """
    gens = list(pool.generators)
    if ordering == "as-given":
        return gens
    if ordering == "doubles-first":
        return sorted(gens, key=lambda g: -g.rank if isinstance(g, ExcitationGenerator) else 0)
    if ordering == "random":
        perm = np.random.default_rng(seed).permutation(len(gens))
        return [gens[i] for i in perm]
    raise ContractError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")


@dataclass(frozen=True)
class AnsatzSpec:
    """Description of a product ansatz ``prod_layers prod_slices prod_gen exp(theta/(2t) A)``.

    Attributes:
        pool: Generators (fermionic or Pauli strings).
        n_qubits: Register size.
        reference: Occupation bitmask of the reference determinant.
        ordering: ``doubles-first`` (default), ``as-given`` or ``random``.
        trotter_number: Slices ``t``; each slice uses angle ``theta / t``.
        repetitions: Independently parametrized layers ``k``.
        seed: Seed for the ``random`` ordering.
        strategy: Circuit compiler for fermionic blocks, ``naive`` or ``tableau``.
    """

    pool: ExcitationPool
    n_qubits: int
    reference: int = 0
    ordering: str = "doubles-first"
    trotter_number: int = 1
    repetitions: int = 1
    seed: int | None = None
    strategy: str = "naive"

    def __post_init__(self):
        if self.trotter_number < 1 or self.repetitions < 1:
            raise ContractError("trotter_number and repetitions must be at least 1")
        if self.strategy not in STRATEGIES:
            raise ContractError(f"unknown strategy {self.strategy!r}")
        if self.ordering not in ORDERINGS:
            raise ContractError(f"unknown ordering {self.ordering!r}")
        if not 0 <= self.reference < 1 << self.n_qubits:
            raise DimensionError("reference mask does not fit the register")


@dataclass(frozen=True)
class Slot:
    """One exponential in the product: generator, parameter index, angle multiplier."""

    generator: ExcitationGenerator | PauliString
    param: int
    multiplier: float


def _generator_op(g, n: int):
    if isinstance(g, ExcitationGenerator):
        return sparse_operator(encode_generator(g, n))
    return g


class Ansatz:
    """Ordered product of exponentials acting on a reference determinant.

    Fermionic slots apply ``exp(x A)`` with ``x = multiplier * theta / 2`` via
    the closed form ``1 + sin(x) A + (1 - cos x) A^2``; Pauli-string slots
    apply ``exp(-i x P)``.
    """

    def __init__(self, spec: AnsatzSpec):
        self.spec = spec
        self.n_qubits = spec.n_qubits
        self.generators = order_pool(spec.pool, spec.ordering, spec.seed)
        if not self.generators:
            raise ContractError("ansatz needs a nonempty pool")
        for g in self.generators:
            size = g.max_index + 1 if isinstance(g, ExcitationGenerator) else g.n_qubits
            if size > self.n_qubits or (isinstance(g, PauliString) and g.n_qubits != self.n_qubits):
                raise DimensionError(f"generator {g} does not fit {self.n_qubits} qubits")
            if isinstance(g, PauliString) and (g.phase != 0 or g.is_identity()):
                raise ContractError("qubit generators must be non-identity strings with phase +1")
        n_gen = len(self.generators)
        t = spec.trotter_number
        self.slots = [
            Slot(g, layer * n_gen + j, 1.0 / t)
            for layer in range(spec.repetitions)
            for _ in range(t)
            for j, g in enumerate(self.generators)
        ]
        self._ops = [_generator_op(g, self.n_qubits) for g in self.generators]

    @property
    def n_params(self) -> int:
        return len(self.generators) * self.spec.repetitions

    @property
    def parameter_names(self) -> list[str]:
        n_gen = len(self.generators)
        return [f"theta_{p // n_gen}_{p % n_gen}" for p in range(self.n_params)]

    def _op(self, slot_index: int):
        return self._ops[self.slots[slot_index].param % len(self.generators)]

    def reference_state(self) -> np.ndarray:
        psi = np.zeros(1 << self.n_qubits, dtype=complex)
        psi[self.spec.reference] = 1.0
        return psi

    def apply_slot(self, psi: np.ndarray, slot_index: int, angle: float) -> np.ndarray:
        """Apply one factor with its full angle ``multiplier * theta`` given as ``angle``."""
        op = self._op(slot_index)
        x = angle / 2
        if isinstance(op, PauliString):
            return math.cos(x) * psi - 1j * math.sin(x) * apply_string(op, psi)
        a_psi = op @ psi
        return psi + math.sin(x) * a_psi + (1 - math.cos(x)) * (op @ a_psi)

    def slot_angles(self, params: Sequence[float]) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_params,):
            raise DimensionError(f"expected {self.n_params} parameters, got {params.shape}")
        return np.array([s.multiplier * params[s.param] for s in self.slots])

    def state(self, params: Sequence[float], initial: np.ndarray | None = None) -> np.ndarray:
        psi = self.reference_state() if initial is None else np.array(initial, dtype=complex)
        for k, angle in enumerate(self.slot_angles(params)):
            psi = self.apply_slot(psi, k, angle)
        return psi

    def circuit(self, strategy: str | None = None, include_reference: bool = True) -> Circuit:
        return build_ansatz(self.spec, strategy=strategy, include_reference=include_reference)

    def energy(self, h, params: Sequence[float]) -> float:
        hop = h if sp.issparse(h) else sparse_operator(h)
        psi = self.state(params)
        return float(np.vdot(psi, hop @ psi).real)


def _block(g, param: ParamRef, n: int, strategy: str) -> Circuit:
    if isinstance(g, PauliString):
        return synthesize_pauli_evolution(g, param)
    if strategy == "tableau":
        return compile_generator_tableau(g, param, n)
    return synthesize_generator_naive(g, param, n)


def build_ansatz(
    spec: AnsatzSpec, *, strategy: str | None = None, include_reference: bool = True
) -> Circuit:
    """Parametric circuit: reference preparation, then the ordered Trotterized blocks.

    Parameter names are ``theta_<layer>_<index>`` following the ordered pool.
    """
    ans = Ansatz(spec)
    strategy = spec.strategy if strategy is None else strategy
    if strategy not in STRATEGIES:
        raise ContractError(f"unknown strategy {strategy!r}")
    n = spec.n_qubits
    names = ans.parameter_names
    out = build_reference(spec.reference, n) if include_reference else Circuit(n)
    cache: dict[tuple, Circuit] = {}
    for slot in ans.slots:
        ref = ParamRef(names[slot.param], slot.multiplier)
        key = (slot.generator, ref)
        if key not in cache:
            cache[key] = _block(slot.generator, ref, n, strategy)
        out = out.compose(cache[key])
    return Circuit(n, out.gates, tuple(names))
