"""ADAPT-VQE: grow the ansatz one pool operator at a time."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ContractError
from ..fermion import ExcitationPool
from ..pauli import PauliString, apply_string
from .ansatz import Ansatz, AnsatzSpec, _generator_op
from .vqe import AnsatzObjective, VQEConfig, _hamiltonian_operator, vqe_minimize


@dataclass(frozen=True)
class AdaptConfig:
    """Stopping rules.

    Attributes:
        pool_tol: Stop once the largest pool gradient magnitude is below this.
        max_operators: Hard cap on ansatz length.
        allow_repeats: Whether an operator may be selected more than once.
        stagnation_tol: Stop when an added operator lowers the energy by less.
        vqe: Inner optimizer settings.
    """

    pool_tol: float = 1e-5
    max_operators: int = 50
    allow_repeats: bool = False
    stagnation_tol: float = 1e-12
    vqe: VQEConfig = field(default_factory=VQEConfig)


@dataclass
class AdaptResult:
    """Trace of an ADAPT run.

    ``energies[0]`` is the reference energy and ``energies[k]`` the optimized
    energy with ``k`` operators. ``stop_reason`` is one of ``gradient``,
    ``max_operators``, ``pool_exhausted`` or ``stagnation``.
    """

    energies: list[float]
    operators: list
    operator_indices: list[int]
    parameters: np.ndarray
    max_gradients: list[float]
    stop_reason: str
    converged: bool

    @property
    def energy(self) -> float:
        return self.energies[-1]


def pool_gradients(hop, pool_ops, psi: np.ndarray) -> np.ndarray:
    """``|<psi|[H, A]|psi>| = |2 Re <H psi|A psi>|`` for every pool operator.

    Pauli-string entries use the antihermitian ``-i P`` so the same formula
    gives the slope of ``exp(-i t P / 2)`` up to the factor two.
    """
    h_psi = hop @ psi
    out = np.empty(len(pool_ops))
    for k, op in enumerate(pool_ops):
        a_psi = -1j * apply_string(op, psi) if isinstance(op, PauliString) else op @ psi
        out[k] = abs(2.0 * np.vdot(h_psi, a_psi).real)
    return out


def adapt_vqe(
    h,
    pool: ExcitationPool,
    config: AdaptConfig | None = None,
    *,
    n_qubits: int | None = None,
    reference: int = 0,
) -> AdaptResult:
    """Run ADAPT-VQE from a reference determinant.

    Each iteration evaluates the commutator gradient of every pool operator
    on the current state, appends the largest one (ties go to the lowest pool
    index), and re-optimizes all parameters starting from the previous
    optimum with the new angle at zero.

    Raises:
        ContractError: empty pool.
    """
    cfg = config or AdaptConfig()
    if len(pool) == 0:
        raise ContractError("ADAPT needs a nonempty pool")
    hop = _hamiltonian_operator(h)
    n = n_qubits if n_qubits is not None else hop.shape[0].bit_length() - 1
    pool_ops = [_generator_op(g, n) for g in pool]
    psi = np.zeros(1 << n, dtype=complex)
    psi[reference] = 1.0
    energies = [float(np.vdot(psi, hop @ psi).real)]
    chosen: list = []
    indices: list[int] = []
    params = np.zeros(0)
    max_grads: list[float] = []
    stop = "max_operators"
    while len(chosen) < cfg.max_operators:
        grads = pool_gradients(hop, pool_ops, psi)
        if not cfg.allow_repeats:
            grads[indices] = -1.0
        best = int(np.argmax(grads))  # argmax returns the first maximum
        g_max = float(grads[best])
        max_grads.append(max(g_max, 0.0))
        if g_max < 0:
            stop = "pool_exhausted"
            break
        if g_max < cfg.pool_tol:
            stop = "gradient"
            break
        trial_ops = chosen + [pool[best]]
        pool_type = _RepeatPool if cfg.allow_repeats else ExcitationPool
        spec = AnsatzSpec(pool_type(tuple(trial_ops)), n, reference, ordering="as-given")
        ansatz = Ansatz(spec)
        vcfg = dataclasses.replace(cfg.vqe, initial=tuple(np.append(params, 0.0)))
        res = vqe_minimize(hop, ansatz, vcfg)
        if res.energy > energies[-1] - cfg.stagnation_tol:
            stop = "stagnation"
            break
        chosen = trial_ops
        indices.append(best)
        params = res.parameters
        energies.append(res.energy)
        psi = AnsatzObjective(ansatz, hop).state(params)
    converged = stop == "gradient"
    return AdaptResult(energies, chosen, indices, params, max_grads, stop, converged)


class _RepeatPool(ExcitationPool):
    """Pool variant that tolerates repeated generators (ADAPT with repeats)."""

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))


__all__ = ["AdaptConfig", "AdaptResult", "adapt_vqe", "pool_gradients"]
