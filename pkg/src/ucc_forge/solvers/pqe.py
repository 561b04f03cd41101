"""Projective quantum eigensolver: drive the projected residuals to zero."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ContractError, DegenerateInputError, DivergenceError
from ..fermion import ExcitationGenerator
from .ansatz import Ansatz, AnsatzSpec
from .vqe import _hamiltonian_operator

DIVERGENCE_STEPS = 5


@dataclass(frozen=True)
class PQEConfig:
    """Iteration settings.

    Attributes:
        residual_tol: Converged when every ``|r_mu|`` is below this.
        max_iterations: Iteration cap; reaching it returns ``converged=False``.
        divergence_steps: Consecutive residual-norm increases that abort the run.
    """

    residual_tol: float = 1e-8
    max_iterations: int = 200
    divergence_steps: int = DIVERGENCE_STEPS


@dataclass
class PQEResult:
    energy: float
    parameters: np.ndarray
    residuals: np.ndarray
    iterations: int
    converged: bool
    residual_norms: list[float] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)


class _Projector:
    """Residuals ``r_mu = <Phi_mu|U^dag H U|Phi_ref>`` with ``|Phi_mu> = A_mu |Phi_ref>``."""

    def __init__(self, ansatz: Ansatz, h):
        self.ansatz = ansatz
        self.hop = _hamiltonian_operator(h)
        ref = ansatz.reference_state()
        if ansatz.spec.repetitions != 1:
            raise ContractError("PQE needs one amplitude per excitation (repetitions=1)")
        self.bras = []
        seen = set()
        for op, g in zip(ansatz._ops, ansatz.generators):
            if not isinstance(g, ExcitationGenerator):
                raise ContractError("PQE pools must hold fermionic excitations")
            phi = op @ ref
            nz = np.flatnonzero(np.abs(phi) > 1e-12)
            if len(nz) != 1 or abs(abs(phi[nz[0]]) - 1) > 1e-12:
                raise ContractError(f"{g} does not map the reference to a single determinant")
            if nz[0] in seen:
                raise ContractError(f"{g} duplicates an excited determinant")
            seen.add(int(nz[0]))
            self.bras.append(phi)
        self.bras = np.array(self.bras)
        diag = self.hop.diagonal().real
        e_ref = diag[ansatz.spec.reference]
        occ = [int(np.flatnonzero(np.abs(b) > 1e-12)[0]) for b in self.bras]
        self.denominators = diag[occ] - e_ref
        if np.any(np.abs(self.denominators) < 1e-10):
            raise DegenerateInputError("an excited determinant is degenerate with the reference")

    def evaluate(self, params) -> tuple[np.ndarray, float]:
        ans = self.ansatz
        angles = ans.slot_angles(params)
        psi = ans.reference_state()
        for k, a in enumerate(angles):
            psi = ans.apply_slot(psi, k, a)
        h_psi = self.hop @ psi
        energy = float(np.vdot(psi, h_psi).real)
        w = h_psi
        for k in range(len(angles) - 1, -1, -1):
            w = ans.apply_slot(w, k, -angles[k])
        return (self.bras.conj() @ w).real, energy


def pqe_residuals(h, spec: AnsatzSpec, params) -> np.ndarray:
    """Residual vector at ``params``."""
    return _Projector(Ansatz(spec), h).evaluate(params)[0]


def pqe_solve(h, spec: AnsatzSpec, config: PQEConfig | None = None) -> PQEResult:
    """Solve the projective equations by a diagonally preconditioned fixed point.

    To first order ``r_mu = H_mu0 + (theta_mu / 2) Delta_mu`` with ``Delta_mu``
    the difference of diagonal determinant energies, so the update is
    ``theta_mu <- theta_mu - 2 r_mu / Delta_mu``.

    Raises:
        ContractError: an excitation does not map the reference to a distinct
            determinant.
        DegenerateInputError: a zero denominator.
        DivergenceError: the residual norm grew for ``divergence_steps``
            consecutive iterations; ``trace`` holds the residual norms.
    """
    cfg = config or PQEConfig()
    proj = _Projector(Ansatz(spec), h)
    theta = np.zeros(proj.ansatz.n_params)
    norms: list[float] = []
    energies: list[float] = []
    rising = 0
    r, e = proj.evaluate(theta)
    for it in range(cfg.max_iterations + 1):
        norms.append(float(np.linalg.norm(r)))
        energies.append(e)
        if np.max(np.abs(r), initial=0.0) < cfg.residual_tol:
            return PQEResult(e, theta, r, it, True, norms, energies)
        if len(norms) > 1 and norms[-1] > norms[-2]:
            rising += 1
            if rising >= cfg.divergence_steps:
                raise DivergenceError(
                    f"residual norm increased for {rising} consecutive steps", norms
                )
        else:
            rising = 0
        if it == cfg.max_iterations:
            break
        theta = theta - 2.0 * r / proj.denominators
        r, e = proj.evaluate(theta)
    return PQEResult(e, theta, r, cfg.max_iterations, False, norms, energies)
