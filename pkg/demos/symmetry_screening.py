"""Pool reduction by spin and orbital symmetry for H2 in the 6-31G basis.

The D2h irreps of the molecular orbitals are stored with the fixture. Every
excitation that symmetry removes has a vanishing Hamiltonian coupling to the
Hartree-Fock determinant, which the script confirms numerically.

    python demos/symmetry_screening.py
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ucc_forge.fermion import (
    D2H,
    OrbitalSymmetryMap,
    build_pool_sd,
    encode_generator,
    parse_integrals,
    screen_orbital,
    screen_spin,
)
from ucc_forge.sim import basis_state

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def main() -> None:
    meta = json.loads((FIXTURES / "h2_631g.json").read_text())
    h = parse_integrals((FIXTURES / "h2_631g.int").read_text()).to_pauli()
    labels = tuple(meta["orbital_irreps"])
    print("orbital irreps:", ", ".join(labels))
    pool = build_pool_sd(1, len(labels) - 1)
    spin = screen_spin(pool)
    both = screen_orbital(spin, OrbitalSymmetryMap(labels), D2H)
    for name, p in (("full", pool), ("spin", spin), ("spin+orbital", both)):
        print(f"{name:>13}: {len(p.singles):2d} singles, {len(p.doubles):2d} doubles")
    ref = basis_state(h.n_qubits, 0b11)
    hm = h.to_matrix()
    removed = [g for g in pool if g not in set(both)]
    worst = max(abs(np.vdot(encode_generator(g, h.n_qubits).to_matrix() @ ref, hm @ ref)) for g in removed)
    print(f"largest HF coupling among {len(removed)} removed excitations: {worst:.1e}")


if __name__ == "__main__":
    main()
