"""One test per acceptance criterion, each recording a PASS/FAIL line.

Two criteria compare against printed values that a dense oracle shows to be
inconsistent. Those checks still assert the printed values, raising
:class:`PrintedValueMismatch`, and the tests are marked strict ``xfail`` for that
exception only. Any other failure in them, or an unexpected pass, is reported.
"""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest
import scipy.linalg

from _oracles import (
    fixture_meta,
    fixture_text,
    gate_dense,
    generator_dense,
    pauli_string_dense,
    pauli_sum_dense,
    random_pauli_sum,
)
from ucc_forge import PauliString, PauliSum
from ucc_forge.circuit import Circuit, Gate, ParamRef, synthesize_generator_naive
from ucc_forge.fermion import (
    D2H,
    ExcitationGenerator,
    ExcitationPool,
    OrbitalSymmetryMap,
    build_pool_sd,
    encode_generator,
    jw_ladder,
    parse_integrals,
    screen_orbital,
    screen_spin,
)
from ucc_forge.pauli import anticommutator, commutes
from ucc_forge.sim import (
    basis_state,
    circuit_to_unitary,
    exact_ground_state,
    phase_distance,
    spectrum,
)
from ucc_forge.solvers import (
    AdaptConfig,
    Ansatz,
    AnsatzObjective,
    AnsatzSpec,
    adapt_vqe,
    iqcc_step,
    pqe_residuals,
    pqe_solve,
    qcc_screen,
    qpe_run,
    vqe_minimize,
)
from ucc_forge.tableau import (
    CliffordOp,
    Tableau,
    apply_clifford,
    compile_double,
    compile_generator_tableau,
    compile_singles_block,
    parity_span_double,
    parity_span_singles,
    singles_block_generators,
)

HF = 0b0011


class PrintedValueMismatch(AssertionError):
    """A printed value disagrees with the independently checked result."""


@pytest.fixture(scope="module")
def h2():
    h = parse_integrals(fixture_text("h2_sto3g.int")).to_pauli()
    e_dense = exact_ground_state(h)[0]
    meta = fixture_meta("h2_sto3g.json")
    # the independent chemistry oracle and dense diagonalization agree
    assert abs(e_dense - meta["e_fci"]) < 1e-8
    return h, e_dense


def _singles_layouts():
    for offset in range(3):
        for L in range(7):
            i = offset
            yield L, (i, i + 1, i + 2 + L, i + 3 + L)


def _double_layouts():
    for L in range(7):
        for left in range(L + 1):
            for gap in (0, 2):
                i = 0
                j = i + 1 + left
                a = j + 1 + gap
                b = a + 1 + (L - left)
                yield L, (i, j, a, b)


@pytest.mark.xfail(
    strict=True,
    raises=PrintedValueMismatch,
    reason="at L=0 the singles block needs 14 two-qubit gates; the 16+2L formula counts an empty ladder",
)
def test_criterion_01_gate_count_exactness(verdict):
    start = time.perf_counter()
    misses = []
    n_cases = 0
    for L, idx in _singles_layouts():
        n = idx[3] + 2
        assert parity_span_singles(*idx) == L
        refs = [ParamRef(f"t{k}") for k in range(4)]
        tab = compile_singles_block(*idx, refs, n).two_qubit_count()
        naive = sum(
            synthesize_generator_naive(g, 0.1, n).two_qubit_count()
            for g in singles_block_generators(*idx)
        )
        n_cases += 1
        if (tab, naive) != (16 + 2 * L, 32 + 16 * L):
            misses.append(f"singles {idx}: tableau={tab} naive={naive} L={L}")
    for L, idx in _double_layouts():
        n = idx[3] + 2
        assert parity_span_double(*idx) == L
        tab = compile_double(*idx, ParamRef("t"), n).two_qubit_count()
        naive = synthesize_generator_naive(ExcitationGenerator.double(*idx), 0.1, n).two_qubit_count()
        n_cases += 1
        if (tab, naive) != (24 + 2 * L, 48 + 16 * L):
            misses.append(f"double {idx}: tableau={tab} naive={naive} L={L}")
    elapsed = time.perf_counter() - start
    ok = not misses and elapsed < 1.0
    verdict(1, ok, f"{n_cases - len(misses)}/{n_cases} layouts exact, {elapsed:.2f} s"
            + (f"; misses: {'; '.join(misses[:3])}" if misses else ""))
    assert elapsed < 1.0
    unexpected = [m for m in misses if not (m.startswith("singles") and m.endswith("L=0"))]
    assert not unexpected, unexpected
    if misses:
        raise PrintedValueMismatch("; ".join(misses))


def _random_excitation(rng):
    rank = int(rng.integers(1, 3))
    n = int(rng.integers(2 * rank, 9))
    modes = [int(m) for m in rng.choice(n, 2 * rank, replace=False)]
    g = ExcitationGenerator(tuple(sorted(modes[rank:])), tuple(sorted(modes[:rank])))
    return g, n


def test_criterion_02_compiler_equivalence(verdict):
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    worst, n_cases = 0.0, 60
    for _ in range(n_cases):
        g, n = _random_excitation(rng)
        theta = float(rng.uniform(-np.pi, np.pi))
        naive = circuit_to_unitary(synthesize_generator_naive(g, theta, n))
        tab = circuit_to_unitary(compile_generator_tableau(g, theta, n))
        worst = max(worst, phase_distance(naive, tab))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 30
    verdict(2, ok, f"{n_cases} instances, max Frobenius distance {worst:.1e}, {elapsed:.1f} s")
    assert worst <= 1e-10
    assert elapsed < 30


def _decode(m: np.ndarray, n: int) -> PauliString:
    """Read a phased Pauli string off a dense matrix by exhaustive matching."""
    x = int(np.argmax(np.abs(m[:, 0])))
    for z in range(1 << n):
        for phase in range(4):
            p = PauliString(n, x, z, phase)
            if np.allclose(pauli_string_dense(p), m, atol=1e-12):
                return p
    raise AssertionError("matrix is not a Pauli string")


def _random_clifford(rng, n):
    kind = str(rng.choice(["H", "S", "CX", "CZ"]))
    if kind in ("H", "S"):
        return CliffordOp(kind, (int(rng.integers(n)),))
    a, b = rng.choice(n, 2, replace=False)
    return CliffordOp(kind, (int(a), int(b)))


# conjugated blocks of the worked CX(1,2) example as printed, qubit 0 first
PRINTED_T1_AFTER_CX = ([[1, 0, 0, 1], [1, 0, 0, 1]], [[1, 0, 1, 0], [1, 0, 1, 1]], [0, 1])


@pytest.mark.xfail(
    strict=True,
    raises=PrintedValueMismatch,
    reason="the printed second row has Z0=1, but a CX on qubits 1,2 cannot change qubit 0",
)
def test_criterion_03_clifford_rule_fidelity(verdict):
    rng = np.random.default_rng(3)
    n_cases, mismatches = 1000, 0
    for _ in range(n_cases):
        n = 4
        rows = []
        while len(rows) < 2:
            x, z = int(rng.integers(1 << n)), int(rng.integers(1 << n))
            p = PauliString(n, x, z, 2 * int(rng.integers(2)))
            if all(commutes(p, r) for r in rows):
                rows.append(p)
        op = _random_clifford(rng, n)
        out = apply_clifford(Tableau.from_strings(rows), op)
        c = gate_dense(op.gate(), n)
        for r, p in enumerate(rows):
            if out.row(r) != _decode(c.conj().T @ pauli_string_dense(p) @ c, n):
                mismatches += 1
    t1 = Tableau(4, [[1, 0, 0, 1], [1, 0, 0, 1]], [[1, 1, 1, 0], [0, 1, 1, 1]], [0, 1])
    x, z, s = apply_clifford(t1, CliffordOp("CX", (1, 2))).bits()
    got = (x.tolist(), z.tolist(), s.tolist())
    worked = got == PRINTED_T1_AFTER_CX
    verdict(3, mismatches == 0 and worked,
            f"{n_cases - mismatches}/{n_cases} random cases bit-exact; worked example "
            f"{'matches' if worked else 'differs from'} the printed blocks (row 2 Z computed "
            f"{''.join(map(str, got[1][1]))}, printed {''.join(map(str, PRINTED_T1_AFTER_CX[1][1]))})")
    assert mismatches == 0
    # the computed first row and sign vector match the printed blocks as well
    assert got[0] == PRINTED_T1_AFTER_CX[0] and got[1][0] == PRINTED_T1_AFTER_CX[1][0]
    assert got[2] == PRINTED_T1_AFTER_CX[2]
    if got != PRINTED_T1_AFTER_CX:
        raise PrintedValueMismatch(f"computed {got}, printed {PRINTED_T1_AFTER_CX}")


def test_criterion_04_commuting_subterms(verdict):
    n_doubles, failures = 0, 0
    for n in range(4, 9):
        for i, j, a, b in itertools.combinations(range(n), 4):
            strings = [p for p, _ in encode_generator(ExcitationGenerator.double(i, j, a, b), n)]
            n_doubles += 1
            if len(strings) != 8 or not all(commutes(p, q) for p, q in itertools.combinations(strings, 2)):
                failures += 1
    verdict(4, failures == 0, f"{n_doubles - failures}/{n_doubles} doubles with 8 pairwise commuting strings")
    assert failures == 0


def test_criterion_05_car_relations(verdict):
    checked, failures = 0, 0
    for n in range(1, 9):
        ident = PauliSum.identity(n)
        zero = PauliSum.zero(n)
        ann = [jw_ladder(k, n, "annihilation") for k in range(n)]
        cre = [jw_ladder(k, n, "creation") for k in range(n)]
        for p, q in itertools.product(range(n), repeat=2):
            checked += 1
            ok = anticommutator(ann[p], cre[q]).simplify() == (ident if p == q else zero)
            ok &= anticommutator(ann[p], ann[q]).simplify() == zero
            ok &= anticommutator(cre[p], cre[q]).simplify() == zero
            failures += not ok
    verdict(5, failures == 0, f"{checked - failures}/{checked} mode pairs satisfy the CAR up to 8 modes")
    assert failures == 0


def test_criterion_06_qpe_worked_example(verdict):
    h = PauliSum.from_text("0.5\n-0.5 X0", 1)
    out = qpe_run(h, Circuit(1), 1)
    p0, p1 = out.probability(0), out.probability(1)
    err = max(abs(p0 - 0.5), abs(p1 - 0.5))
    plus = qpe_run(h, Circuit(1, (Gate("H", (0,)),)), 1)
    minus = qpe_run(h, Circuit(1, (Gate("X", (0,)), Gate("H", (0,)))), 1)
    single = plus.probability(0) > 1 - 1e-12 and minus.probability(1) > 1 - 1e-12
    ok = err <= 1e-12 and single
    verdict(6, ok, f"|0> gives P(0)={p0:.12g} P(1)={p1:.12g}; "
            f"eigenstates give single outcomes: {single}")
    assert err <= 1e-12
    assert single


def test_criterion_07_vqe_to_fci(h2, verdict):
    h, e_fci = h2
    start = time.perf_counter()
    uccsd = vqe_minimize(h, AnsatzSpec(build_pool_sd(1, 1), 4, HF))
    best, _ = qcc_screen(h, HF)[0]
    qcc = vqe_minimize(h, AnsatzSpec(ExcitationPool((best,), "qubit"), 4, HF))
    elapsed = time.perf_counter() - start
    d1, d2 = abs(uccsd.energy - e_fci), abs(qcc.energy - e_fci)
    ok = d1 < 1e-6 and d2 < 1e-6 and elapsed < 60
    verdict(7, ok, f"UCCSD error {d1:.1e} Ha, QCC ({best}) error {d2:.1e} Ha, {elapsed:.2f} s")
    assert d1 < 1e-6 and d2 < 1e-6
    assert elapsed < 60


def test_criterion_08_pqe(h2, verdict):
    h, e_fci = h2
    spec = AnsatzSpec(build_pool_sd(1, 1), 4, HF)
    res = pqe_solve(h, spec)
    # residuals recomputed from the returned amplitudes, not the solver's own record
    rmax = float(np.max(np.abs(pqe_residuals(h, spec, res.parameters))))
    err = abs(res.energy - e_fci)
    ok = res.converged and rmax < 1e-8 and err < 1e-6
    verdict(8, ok, f"converged={res.converged} in {res.iterations} steps, max residual {rmax:.1e}, "
            f"energy error {err:.1e} Ha")
    assert res.converged
    assert rmax < 1e-8 and err < 1e-6


def test_criterion_09_adapt(h2, verdict):
    h, e_fci = h2
    res = adapt_vqe(h, build_pool_sd(1, 1), AdaptConfig(), n_qubits=4, reference=HF)
    monotone = all(b <= a + 1e-9 for a, b in zip(res.energies, res.energies[1:]))
    first_double = res.operators[0].rank == 2
    err = abs(res.energy - e_fci)
    ok = monotone and first_double and err < 1e-6
    verdict(9, ok, f"operators {[str(g) for g in res.operators]}, non-increasing={monotone}, "
            f"energy error {err:.1e} Ha")
    assert monotone and first_double
    assert err < 1e-6


def test_criterion_10_gradient_check(verdict):
    rng = np.random.default_rng(10)
    n_cases, worst, step = 24, 0.0, 1e-5
    for _ in range(n_cases):
        n = int(rng.integers(4, 7))
        gens = set()
        while len(gens) < int(rng.integers(2, 5)):
            g, _ = _random_excitation(rng)
            if g.max_index < n:
                gens.add(g)
        spec = AnsatzSpec(
            ExcitationPool(tuple(sorted(gens))), n, int(rng.integers(0, 1 << n)),
            trotter_number=int(rng.integers(1, 3)), repetitions=int(rng.integers(1, 3)),
            ordering="as-given",
        )
        obj = AnsatzObjective(Ansatz(spec), random_pauli_sum(rng, n, 20))
        params = rng.uniform(-np.pi, np.pi, obj.n_params)
        fd = np.array([
            (obj.energy(params + step * e) - obj.energy(params - step * e)) / (2 * step)
            for e in np.eye(obj.n_params)
        ])
        worst = max(worst, float(np.max(np.abs(obj.gradient(params) - fd))))
    verdict(10, worst < 1e-6, f"{n_cases} instances, max |shift - FD| = {worst:.1e}")
    assert worst < 1e-6


def _alpha_count(idx):
    return sum(1 for k in idx if k % 2 == 0)


def _bits_d2h():
    # D2h irreps as characters of Z2^3, under which the product is xor
    return {"Ag": 0, "B1g": 1, "B2g": 2, "B3g": 3, "Au": 4, "B1u": 5, "B2u": 6, "B3u": 7}


def _brute_orbital(pool, labels):
    bits = _bits_d2h()
    keep = set()
    for g in pool:
        lhs = rhs = 0
        for k in g.creation:
            lhs ^= bits[labels[k // 2]]
        for k in g.annihilation:
            rhs ^= bits[labels[k // 2]]
        if lhs == rhs:
            keep.add(g)
    return keep


def test_criterion_11_spin_screening(verdict):
    notes, ok = [], True
    for n_occ, n_virt in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)]:
        pool = build_pool_sd(n_occ, n_virt)
        kept = screen_spin(pool)
        singles_half = 2 * len(kept.singles) == len(pool.singles)
        occ, virt = range(2 * n_occ), range(2 * n_occ, 2 * (n_occ + n_virt))
        brute = {
            ExcitationGenerator((a, b), (i, j))
            for i, j in itertools.combinations(occ, 2)
            for a, b in itertools.combinations(virt, 2)
            if _alpha_count((i, j)) == _alpha_count((a, b))
        }
        ok &= singles_half and set(kept.doubles) == brute
    notes.append("closed-shell singles halved and doubles equal brute force" if ok else "spin mismatch")
    labeled = []
    for name in ("h2_sto3g", "h2_631g"):
        meta = fixture_meta(f"{name}.json")
        labels = tuple(meta["orbital_irreps"])
        n_spatial = len(labels)
        n_occ = meta["n_electrons"] // 2
        pool = build_pool_sd(n_occ, n_spatial - n_occ)
        kept = screen_orbital(screen_spin(pool), OrbitalSymmetryMap(labels), D2H)
        same = set(kept) == _brute_orbital(screen_spin(pool), labels)
        ok &= same
        labeled.append(f"{name} {len(kept)}/{len(pool)} kept")
    rng = np.random.default_rng(11)
    names = list(_bits_d2h())
    for _ in range(20):
        n_occ, n_virt = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        labels = tuple(names[int(k)] for k in rng.integers(0, 8, n_occ + n_virt))
        pool = build_pool_sd(n_occ, n_virt)
        ok &= set(screen_orbital(pool, OrbitalSymmetryMap(labels), D2H)) == _brute_orbital(pool, labels)
    notes.append("D2h " + ", ".join(labeled) + ", 20 random labelings equal brute force")
    verdict(11, ok, "; ".join(notes))
    assert ok


def test_criterion_12_dressing(verdict):
    rng = np.random.default_rng(12)
    worst_spec = worst_conj = 0.0
    for n in range(2, 7):
        h = random_pauli_sum(rng, n, 3 * n)
        chosen = []
        for _ in range(3):
            p = PauliString(n, int(rng.integers(1, 1 << n)), int(rng.integers(0, 1 << n)))
            chosen.append((p, float(rng.uniform(-np.pi, np.pi))))
        dressed = iqcc_step(h, chosen)
        worst_spec = max(worst_spec, float(np.max(np.abs(spectrum(dressed) - spectrum(h)))))
        u = np.eye(1 << n, dtype=complex)
        for p, theta in chosen:
            u = scipy.linalg.expm(-0.5j * theta * pauli_string_dense(p)) @ u
        target = u.conj().T @ pauli_sum_dense(h) @ u
        worst_conj = max(worst_conj, float(np.max(np.abs(pauli_sum_dense(dressed) - target))))
    ok = worst_spec < 1e-10 and worst_conj < 1e-10
    verdict(12, ok, f"2..6 qubits: spectrum drift {worst_spec:.1e}, conjugation error {worst_conj:.1e}")
    assert ok


def test_criterion_13_trotter_order(verdict):
    gens = (ExcitationGenerator.single(0, 1), ExcitationGenerator.single(1, 2))
    theta = np.array([1.3, -0.9])
    a = sum(th * generator_dense(g.creation, g.annihilation, 3) for g, th in zip(gens, theta))
    exact = scipy.linalg.expm(a / 2)
    ts = [1, 2, 4, 8]
    dists = []
    for t in ts:
        ans = Ansatz(AnsatzSpec(ExcitationPool(gens), 3, ordering="as-given", trotter_number=t))
        u = np.column_stack([ans.state(theta, initial=basis_state(3, b)) for b in range(8)])
        dists.append(float(np.linalg.norm(u - exact)))
    slope = float(np.polyfit(np.log(ts), np.log(dists), 1)[0])
    ok = abs(slope + 1) <= 0.2
    verdict(13, ok, f"distances {', '.join(f'{d:.2e}' for d in dists)}, log-log slope {slope:.3f}")
    assert ok
