"""Regenerate the molecular test fixtures with PySCF.

This script is not part of the package. It was run once to freeze the
integral files and reference energies under ``tests/fixtures/``::

    pip install pyscf
    python tools/make_fixtures.py

Spin-orbitals are interleaved (spatial ``p`` -> ``2p`` alpha, ``2p + 1`` beta)
and the two-body table follows ``H = c + sum h_pq a+_p a_q
+ sum h_pqrs a+_p a+_q a_r a_s``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from pyscf import ao2mo, fci, gto, scf, symm

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def spin_orbital_tables(h1_mo, eri_mo):
    n = h1_mo.shape[0]
    m = 2 * n
    h1 = np.zeros((m, m))
    h2 = np.zeros((m, m, m, m))
    for p in range(m):
        for q in range(m):
            if p % 2 == q % 2:
                h1[p, q] = h1_mo[p // 2, q // 2]
    for p in range(m):
        for q in range(m):
            for r in range(m):
                for s in range(m):
                    if p % 2 == q % 2 and r % 2 == s % 2:
                        # chemist (pq|rs) -> a+_p a+_r a_s a_q
                        h2[p, r, s, q] = 0.5 * eri_mo[p // 2, q // 2, r // 2, s // 2]
    return h1, h2


def write_integrals(path, constant, h1, h2, comment):
    m = h1.shape[0]
    lines = [f"# {comment}", f"norb {m}", f"0 {constant:.16e}"]
    for p in range(m):
        for q in range(m):
            if abs(h1[p, q]) > 1e-14:
                lines.append(f"1 {p} {q} {h1[p, q]:.16e}")
    for idx in zip(*np.nonzero(np.abs(h2) > 1e-14)):
        p, q, r, s = (int(i) for i in idx)
        lines.append(f"2 {p} {q} {r} {s} {h2[p, q, r, s]:.16e}")
    path.write_text("\n".join(lines) + "\n")


def build(name, atom, basis):
    mol = gto.M(atom=atom, basis=basis, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    c = mf.mo_coeff
    h1_mo = c.T @ mf.get_hcore() @ c
    nmo = c.shape[1]
    eri_mo = ao2mo.restore(1, ao2mo.kernel(mol, c), nmo)
    e_fci, _ = fci.FCI(mf).kernel()
    h1, h2 = spin_orbital_tables(h1_mo, eri_mo)
    # label the same orbitals in the D2h subgroup without re-running SCF
    sym_mol = gto.M(atom=atom, basis=basis, unit="Angstrom", verbose=0,
                    symmetry=True, symmetry_subgroup="D2h")
    irreps = symm.label_orb_symm(sym_mol, sym_mol.irrep_name, sym_mol.symm_orb, c)
    write_integrals(
        OUT / f"{name}.int",
        mol.energy_nuc(),
        h1,
        h2,
        f"{atom} {basis} RHF orbitals (PySCF {__import__('pyscf').__version__})",
    )
    meta = {
        "atom": atom,
        "basis": basis,
        "n_spin_orbitals": 2 * nmo,
        "n_electrons": int(mol.nelectron),
        "e_nuc": float(mol.energy_nuc()),
        "e_hf": float(mf.e_tot),
        "e_fci": float(e_fci),
        "point_group": "D2h",
        "orbital_irreps": [str(x) for x in irreps],
    }
    (OUT / f"{name}.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(name, meta)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    build("h2_sto3g", "H 0 0 0; H 0 0 0.7414", "sto-3g")
    build("h2_631g", "H 0 0 0; H 0 0 0.7414", "6-31g")
