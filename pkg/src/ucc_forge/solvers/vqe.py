"""Energy objectives, shift-rule gradients and the VQE driver."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
import scipy.sparse as sp

from ..circuit import Circuit, Gate, ParamRef
from ..exceptions import ContractError, DimensionError
from ..pauli import PauliString, PauliSum
from ..sim import apply_circuit, zero_state
from .ansatz import Ansatz, AnsatzSpec, sparse_operator


def _hamiltonian_operator(h) -> sp.csr_matrix:
    if sp.issparse(h):
        return h.tocsr()
    if not h.is_hermitian():
        raise ContractError("the Hamiltonian must be Hermitian")
    return sparse_operator(h)


class AnsatzObjective:
    """Energy ``<ref|U(theta)^dag H U(theta)|ref>`` of an :class:`Ansatz` and its gradient.

    Fermionic factors ``exp(phi A / 2)`` are split into the commuting
    involution halves ``exp(phi/4 (A + iP)) exp(phi/4 (A - iP))`` with ``P`` the
    nullspace projector ``1 + A^2``. Both halves square to ``-1``, so each has
    an exact two-point shift rule; four shifted energies per factor give the
    derivative. Pauli-string factors ``exp(-i phi P / 2)`` use the usual
    ``+-pi/2`` rule.
    """

    def __init__(self, ansatz: Ansatz, h):
        self.ansatz = ansatz
        self.hop = _hamiltonian_operator(h)
        if self.hop.shape[0] != 1 << ansatz.n_qubits:
            raise DimensionError("Hamiltonian and ansatz act on different registers")
        self.n_evaluations = 0

    @property
    def n_params(self) -> int:
        return self.ansatz.n_params

    def _energy_of(self, psi: np.ndarray) -> float:
        self.n_evaluations += 1
        return float(np.vdot(psi, self.hop @ psi).real)

    def state(self, params) -> np.ndarray:
        return self.ansatz.state(params)

    def energy(self, params) -> float:
        return self._energy_of(self.ansatz.state(params))

    def _finish(self, psi: np.ndarray, angles: np.ndarray, start: int) -> float:
        for k in range(start, len(angles)):
            psi = self.ansatz.apply_slot(psi, k, angles[k])
        return self._energy_of(psi)

    def _half_factor(self, psi: np.ndarray, op, x: float, sign: int) -> np.ndarray:
        """``exp(x (A + sign i P)) psi`` using ``(A +- iP)^2 = -1``."""
        a_psi = op @ psi
        p_psi = psi + op @ a_psi
        return math.cos(x) * psi + math.sin(x) * (a_psi + sign * 1j * p_psi)

    def slot_derivatives(self, params) -> np.ndarray:
        """Derivative of the energy with respect to each slot angle."""
        ans = self.ansatz
        angles = ans.slot_angles(params)
        psi = ans.reference_state()
        out = np.zeros(len(angles))
        for k, phi in enumerate(angles):
            op = ans._op(k)
            if isinstance(op, PauliString):
                plus = self._finish(ans.apply_slot(psi, k, phi + math.pi / 2), angles, k + 1)
                minus = self._finish(ans.apply_slot(psi, k, phi - math.pi / 2), angles, k + 1)
                out[k] = 0.5 * (plus - minus)
            else:
                total = 0.0
                for shifted in (+1, -1):
                    other = -shifted
                    for delta in (math.pi, -math.pi):
                        # the shifted half is applied first; the halves commute
                        inner = self._half_factor(psi, op, (phi + delta) / 4, shifted)
                        inner = self._half_factor(inner, op, phi / 4, other)
                        e = self._finish(inner, angles, k + 1)
                        total += 0.25 * e if delta > 0 else -0.25 * e
                out[k] = total
            psi = ans.apply_slot(psi, k, phi)
        return out

    def gradient(self, params) -> np.ndarray:
        grad = np.zeros(self.n_params)
        for slot, d in zip(self.ansatz.slots, self.slot_derivatives(params)):
            grad[slot.param] += slot.multiplier * d
        return grad


class CircuitObjective:
    """Energy of a parametric circuit applied to ``|0...0>`` and its shift-rule gradient.

    Every rotation gate is ``exp(-i a P / 2)`` for a one-qubit ``P``, so each
    symbolic occurrence contributes ``multiplier * (E(a + pi/2) - E(a - pi/2)) / 2``.
    """

    def __init__(self, circuit: Circuit, h, initial: np.ndarray | None = None):
        self.circuit = circuit
        self.hop = _hamiltonian_operator(h)
        if self.hop.shape[0] != 1 << circuit.n_qubits:
            raise DimensionError("Hamiltonian and circuit act on different registers")
        self.initial = zero_state(circuit.n_qubits) if initial is None else np.asarray(initial)
        self.n_evaluations = 0

    @property
    def n_params(self) -> int:
        return len(self.circuit.parameters)

    def _bindings(self, params) -> dict[str, float]:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_params,):
            raise DimensionError(f"expected {self.n_params} parameters, got {params.shape}")
        return dict(zip(self.circuit.parameters, params))

    def _energy_of(self, c: Circuit) -> float:
        self.n_evaluations += 1
        psi = apply_circuit(self.initial, c)
        return float(np.vdot(psi, self.hop @ psi).real)

    def state(self, params) -> np.ndarray:
        return apply_circuit(self.initial, self.circuit.bind(self._bindings(params)))

    def energy(self, params) -> float:
        return self._energy_of(self.circuit.bind(self._bindings(params)))

    def gradient(self, params) -> np.ndarray:
        bindings = self._bindings(params)
        bound = list(self.circuit.bind(bindings).gates)
        index = {name: i for i, name in enumerate(self.circuit.parameters)}
        grad = np.zeros(self.n_params)
        for pos, g in enumerate(self.circuit.gates):
            if not isinstance(g.angle, ParamRef):
                continue
            base = bound[pos].angle
            diff = 0.0
            for shift, weight in ((math.pi / 2, 0.5), (-math.pi / 2, -0.5)):
                gates = list(bound)
                gates[pos] = Gate(g.kind, g.qubits, base + shift)
                diff += weight * self._energy_of(Circuit(self.circuit.n_qubits, tuple(gates)))
            grad[index[g.angle.name]] += g.angle.multiplier * diff
        return grad


def make_objective(ansatz, h):
    """Objective for an :class:`Ansatz`, :class:`AnsatzSpec` or parametric :class:`Circuit`."""
    if isinstance(ansatz, AnsatzSpec):
        ansatz = Ansatz(ansatz)
    if isinstance(ansatz, Ansatz):
        return AnsatzObjective(ansatz, h)
    if isinstance(ansatz, Circuit):
        return CircuitObjective(ansatz, h)
    if isinstance(ansatz, (AnsatzObjective, CircuitObjective)):
        return ansatz
    raise ContractError(f"cannot build an energy objective from {type(ansatz).__name__}")


def gradient(ansatz, h: PauliSum, params: Sequence[float]) -> np.ndarray:
    """Analytic energy gradient by the shift rule.

    Args:
        ansatz: An :class:`Ansatz`, :class:`AnsatzSpec` or parametric circuit.
        h: Hermitian Hamiltonian.
        params: Parameter vector.

    Raises:
        DimensionError: wrong parameter count or register size.
    """
    return make_objective(ansatz, h).gradient(params)


def energy(ansatz, h: PauliSum, params: Sequence[float]) -> float:
    return make_objective(ansatz, h).energy(params)


@dataclass(frozen=True)
class VQEConfig:
    """Optimizer settings.

    Attributes:
        gtol: Convergence threshold on the gradient 2-norm.
        max_iterations: BFGS iteration cap per start.
        restarts: Extra starts from seeded random perturbations of the initial point.
        restart_scale: Standard deviation of those perturbations.
        seed: Seed for the restart generator.
        initial: Starting parameters (zeros when omitted).
    """

    gtol: float = 1e-6
    max_iterations: int = 500
    restarts: int = 0
    restart_scale: float = 0.1
    seed: int | None = 0
    initial: tuple[float, ...] | None = None


@dataclass
class VQEResult:
    """Outcome of a VQE minimization."""

    energy: float
    parameters: np.ndarray
    iterations: int
    gradient_norm: float
    converged: bool
    n_evaluations: int = 0
    history: list[float] = field(default_factory=list)


def _run_bfgs(obj, x0: np.ndarray, cfg: VQEConfig, history: list[float]):
    calls = {"n": 0}

    def fun(x):
        e = obj.energy(x)
        history.append(e)
        return e

    def jac(x):
        calls["n"] += 1
        return obj.gradient(x)

    res = scipy.optimize.minimize(
        fun,
        x0,
        jac=jac,
        method="BFGS",
        options={"gtol": cfg.gtol * 1e-3, "maxiter": cfg.max_iterations},
    )
    return np.asarray(res.x, dtype=float), int(res.nit)


def vqe_minimize(h, spec, opt_config: VQEConfig | None = None) -> VQEResult:
    """Minimize the ansatz energy with analytic gradients.

    Each start runs BFGS (with a line search) from the initial point; extra
    starts use seeded perturbations. The lowest-energy start is returned.

    Args:
        h: Hermitian Hamiltonian.
        spec: :class:`AnsatzSpec`, :class:`Ansatz` or parametric circuit.
        opt_config: Optimizer settings.

    Returns:
        The best result; ``converged`` is false if its gradient norm is not
        below ``gtol``.
    """
    cfg = opt_config or VQEConfig()
    obj = make_objective(spec, h)
    n = obj.n_params
    x0 = np.zeros(n) if cfg.initial is None else np.asarray(cfg.initial, dtype=float)
    if x0.shape != (n,):
        raise DimensionError(f"initial point has shape {x0.shape}, expected ({n},)")
    rng = np.random.default_rng(cfg.seed)
    starts = [x0] + [x0 + cfg.restart_scale * rng.standard_normal(n) for _ in range(cfg.restarts)]
    best = None
    history: list[float] = []
    total_iters = 0
    for start in starts:
        if n == 0:
            x, nit = start, 0
        else:
            x, nit = _run_bfgs(obj, start, cfg, history)
        total_iters += nit
        e = obj.energy(x)
        if best is None or e < best[0]:
            best = (e, x)
    e, x = best
    gnorm = float(np.linalg.norm(obj.gradient(x))) if n else 0.0
    return VQEResult(
        energy=e,
        parameters=x,
        iterations=total_iters,
        gradient_norm=gnorm,
        converged=gnorm < cfg.gtol,
        n_evaluations=obj.n_evaluations,
        history=history,
    )
