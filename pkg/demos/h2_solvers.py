"""Ground-state energy of H2 (STO-3G) with every solver in the package.

Run from the repository root::

    python demos/h2_solvers.py
"""

from __future__ import annotations

import json
from pathlib import Path

from ucc_forge.circuit import Circuit, Gate
from ucc_forge.fermion import ExcitationPool, build_pool_sd, parse_integrals
from ucc_forge.pauli import PauliSum
from ucc_forge.sim import exact_ground_state
from ucc_forge.solvers import AnsatzSpec, adapt_vqe, pqe_solve, qcc_screen, qpe_run, vqe_minimize

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
HF = 0b0011  # spin-orbitals 0 and 1 occupied


def main() -> None:
    h = parse_integrals((FIXTURES / "h2_sto3g.int").read_text()).to_pauli()
    meta = json.loads((FIXTURES / "h2_sto3g.json").read_text())
    e_exact, _ = exact_ground_state(h)
    print(f"{len(h)} Pauli terms on {h.n_qubits} qubits")
    print(f"HF   {meta['e_hf']:.10f}")
    print(f"FCI  {meta['e_fci']:.10f}  (dense diagonalization {e_exact:.10f})")

    uccsd = AnsatzSpec(build_pool_sd(1, 1), 4, HF)
    vqe = vqe_minimize(h, uccsd)
    print(f"UCCSD-VQE  {vqe.energy:.10f}  after {vqe.iterations} BFGS steps")

    ranked = qcc_screen(h, HF)
    best, grad = ranked[0]
    print(f"QCC screen: {len(ranked)} candidates, all with |<[H, P]>| = {grad:.6f}")
    qcc = vqe_minimize(h, AnsatzSpec(ExcitationPool((best,), "qubit"), 4, HF))
    print(f"QCC-VQE    {qcc.energy:.10f}  with the single entangler {best}")

    adapt = adapt_vqe(h, build_pool_sd(1, 1), n_qubits=4, reference=HF)
    chosen = ", ".join(str(g) for g in adapt.operators)
    print(f"ADAPT-VQE  {adapt.energy:.10f}  operators [{chosen}], stop: {adapt.stop_reason}")

    pqe = pqe_solve(h, uccsd)
    print(f"PQE        {pqe.energy:.10f}  in {pqe.iterations} residual updates")

    # a 1-qubit toy with eigenvalues 0 and 1, read out with one energy bit
    toy = PauliSum.from_text("0.5\n-0.5 X0", 1)
    for label, trial in (("|0>", Circuit(1)), ("|+>", Circuit(1, (Gate("H", (0,)),)))):
        out = qpe_run(toy, trial, 1)
        probs = ", ".join(f"P({b})={out.probability(b):.3f}" for b in range(2))
        print(f"QPE on (1 - X)/2 from {label}: {probs}")


if __name__ == "__main__":
    main()
