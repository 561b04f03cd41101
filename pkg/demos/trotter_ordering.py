"""Trotter error and operator ordering for non-commuting excitations.

Two singles sharing mode 1 do not commute, so splitting the exponential into
t slices leaves an error that falls as 1/t. Reordering the factors of a single
slice changes the unitary by about the same amount.

    python demos/trotter_ordering.py
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from ucc_forge.fermion import ExcitationGenerator, ExcitationPool, encode_generator
from ucc_forge.sim import basis_state
from ucc_forge.solvers import Ansatz, AnsatzSpec


def unitary(ans: Ansatz, params) -> np.ndarray:
    dim = 1 << ans.n_qubits
    return np.column_stack([ans.state(params, initial=basis_state(ans.n_qubits, b)) for b in range(dim)])


def main() -> None:
    gens = (ExcitationGenerator.single(0, 1), ExcitationGenerator.single(1, 2))
    theta = np.array([1.3, -0.9])
    a = sum(th * encode_generator(g, 3).to_matrix() for g, th in zip(gens, theta))
    exact = scipy.linalg.expm(a / 2)
    print(" t | ||U_t - exp(A)||")
    prev = None
    for t in (1, 2, 4, 8, 16):
        spec = AnsatzSpec(ExcitationPool(gens), 3, ordering="as-given", trotter_number=t)
        err = np.linalg.norm(unitary(Ansatz(spec), theta) - exact)
        ratio = "" if prev is None else f"  (ratio {prev / err:.2f})"
        print(f"{t:2d} | {err:.4e}{ratio}")
        prev = err
    u_ab = unitary(Ansatz(AnsatzSpec(ExcitationPool(gens), 3, ordering="as-given")), theta)
    u_ba = unitary(Ansatz(AnsatzSpec(ExcitationPool(gens[::-1]), 3, ordering="as-given")), theta[::-1])
    print(f"ordering change at t = 1: ||U_ab - U_ba|| = {np.linalg.norm(u_ab - u_ba):.4e}")


if __name__ == "__main__":
    main()
