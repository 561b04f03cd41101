"""Command-line frontend: ``ucc-forge <command> [options]``.

Reports are ``key=value`` lines on standard output with numbers printed to
12 significant digits. Exit status is 0 on success, 1 when ``check-equiv``
finds the circuits inequivalent, 2 on invalid input (one ``error: ...`` line
on standard error) and 3 when a solver did not converge (the best-so-far
report is still printed).
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence

import numpy as np

from .circuit import (
    Circuit,
    ParamRef,
    build_reference,
    format_circuit,
    parse_circuit,
    synthesize_generator_naive,
)
from .exceptions import (
    ContractError,
    DegenerateInputError,
    DimensionError,
    DivergenceError,
    ParseError,
    SizeLimitError,
    UnboundParameterError,
)
from .fermion import (
    ExcitationGenerator,
    ExcitationPool,
    build_pool_from_orbitals,
    build_pool_generalized,
    build_pool_pair_gsd,
    build_pool_sd,
    format_pool,
    parse_integrals,
    parse_pool,
    screen_spin,
)
from .pauli import PauliString, PauliSum, format_pauli_sum, parse_pauli_sum
from .sim import (
    apply_circuit,
    circuit_to_unitary,
    exact_ground_state,
    expectation,
    phase_distance,
    zero_state,
)
from .solvers import (
    AdaptConfig,
    AnsatzSpec,
    PQEConfig,
    VQEConfig,
    adapt_vqe,
    build_ansatz,
    iqcc_step,
    pqe_solve,
    qcc_screen,
    qpe_run,
    vqe_minimize,
)
from .tableau import (
    compile_generator_tableau,
    compile_singles_block,
    parity_span_double,
    parity_span_singles,
    singles_block_generators,
)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_CONTRACT = 2
EXIT_NOT_CONVERGED = 3


class CliError(Exception):
    """Invalid command-line input; reported as ``error: <message>`` with exit 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def fmt(x) -> str:
    """Number formatting used by every report line."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _report(out, **items) -> None:
    out.write(" ".join(f"{k}={v if isinstance(v, str) else fmt(v)}" for k, v in items.items()) + "\n")


# -- input helpers -------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _in_file(path: str, parse):
    try:
        return parse(_read(path))
    except ParseError as exc:
        raise CliError(f"{path}: {exc}") from None


def _int_list(text: str, what: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise CliError(f"{what} must be comma-separated integers, got {text!r}") from None
    return vals


def _hamiltonian(args) -> PauliSum:
    if args.hamiltonian and args.integrals:
        raise CliError("give either --hamiltonian or --integrals, not both")
    if args.hamiltonian:
        h = _in_file(args.hamiltonian, lambda t: parse_pauli_sum(t, args.n_qubits))
    elif args.integrals:
        h = _in_file(args.integrals, lambda t: parse_integrals(t).to_pauli())
    else:
        raise CliError("a Hamiltonian is required (--hamiltonian or --integrals)")
    if args.n_qubits is not None and h.n_qubits != args.n_qubits:
        raise CliError(f"Hamiltonian acts on {h.n_qubits} qubits, --n-qubits is {args.n_qubits}")
    return h


def _reference(args, n: int) -> int:
    if args.reference is None:
        raise CliError("--reference (occupied spin-orbitals, e.g. 0,1) is required")
    mask = 0
    for q in _int_list(args.reference, "--reference"):
        if not 0 <= q < n:
            raise CliError(f"reference orbital {q} is outside 0..{n - 1}")
        mask |= 1 << q
    return mask


def _pool(args, h: PauliSum, reference: int) -> ExcitationPool:
    n = h.n_qubits
    if args.pool and getattr(args, "qcc", None):
        raise CliError("choose one of --pool and --qcc")
    if args.pool:
        pool = _in_file(args.pool, parse_pool)
    elif getattr(args, "qcc", None):
        ranked = qcc_screen(h, reference)
        pool = ExcitationPool(tuple(p for p, _ in ranked[: args.qcc]), "qubit")
    else:
        occ = [q for q in range(n) if reference >> q & 1]
        virt = [q for q in range(n) if not reference >> q & 1]
        pool = build_pool_from_orbitals(occ, virt)
    if getattr(args, "spin_screen", False):
        pool = screen_spin(pool)
    if len(pool) == 0:
        raise CliError("the operator pool is empty")
    return pool


def _params(text: str | None, names: Sequence[str]) -> dict[str, float]:
    if text is None:
        return {}
    out: dict[str, float] = {}
    items = [t for t in text.split(",") if t.strip()]
    if items and all("=" not in t for t in items):
        if len(items) != len(names):
            raise CliError(f"got {len(items)} parameter values for {len(names)} parameters")
        items = [f"{k}={v}" for k, v in zip(names, items)]
    for item in items:
        if "=" not in item:
            raise CliError(f"mix of named and positional parameters in {text!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise CliError(f"bad parameter value {v!r}") from None
    return out


def _add_hamiltonian_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--hamiltonian", help="Pauli-sum file")
    p.add_argument("--integrals", help="second-quantized integral file")
    p.add_argument("--n-qubits", type=int, help="register size (checked against the input)")


def _add_ansatz_args(p: argparse.ArgumentParser, *, qcc: bool = True) -> None:
    p.add_argument("--reference", help="occupied spin-orbitals, e.g. 0,1")
    p.add_argument("--pool", help="pool file (q1,q2->p1,p2 per line)")
    if qcc:
        p.add_argument("--qcc", type=int, help="use the top-N screened QCC entanglers as pool")
    p.add_argument("--spin-screen", action="store_true", help="drop spin-changing excitations")
    p.add_argument(
        "--ordering", choices=("doubles-first", "as-given", "random"), default="doubles-first"
    )
    p.add_argument("--trotter", type=int, default=1, help="Trotter number t (default 1)")
    p.add_argument("--repetitions", type=int, default=1, help="parameter layers k (default 1)")
    p.add_argument("--seed", type=int, default=0, help="seed for random ordering and restarts")


def _spec(args, h: PauliSum) -> AnsatzSpec:
    n = h.n_qubits
    ref = _reference(args, n)
    pool = _pool(args, h, ref)
    return AnsatzSpec(
        pool,
        n,
        ref,
        ordering=args.ordering,
        trotter_number=args.trotter,
        repetitions=args.repetitions,
        seed=args.seed,
        strategy=getattr(args, "strategy", "naive"),
    )


# -- generator selection for compile / count ------------------------------------------


def _generator_job(args):
    """Return ``(kind, indices)`` from --double / --single / --singles-block."""
    given = [(k, getattr(args, k)) for k in ("double", "single", "singles_block") if getattr(args, k)]
    if len(given) != 1:
        raise CliError("give exactly one of --double, --single, --singles-block")
    kind, text = given[0]
    idx = _int_list(text, f"--{kind.replace('_', '-')}")
    need = {"double": 4, "single": 2, "singles_block": 4}[kind]
    if len(idx) != need:
        raise CliError(f"--{kind.replace('_', '-')} needs {need} indices")
    return kind, idx


def _compile_job(kind: str, idx: list[int], strategy: str, n: int | None, param: str):
    n_q = (max(idx) + 1) if n is None else n
    if n_q <= max(idx):
        raise CliError(f"indices exceed --n-qubits {n_q}")
    if kind == "single":
        g = ExcitationGenerator.single(*idx)
        gens, L, formula = [g], None, None
    elif kind == "double":
        i, j, a, b = idx
        if not i < j < a < b:
            raise CliError("--double needs i<j<a<b")
        g = ExcitationGenerator.double(i, j, a, b)
        gens, L = [g], parity_span_double(i, j, a, b)
        formula = "24+2L" if strategy == "tableau" else "48+16L"
    else:
        i, ib, a, ab = idx
        if not i < ib < a < ab:
            raise CliError("--singles-block needs i<ibar<a<abar")
        gens, L = singles_block_generators(i, ib, a, ab), parity_span_singles(i, ib, a, ab)
        formula = "16+2L" if strategy == "tableau" else "32+16L"
    names = [param] if len(gens) == 1 else [f"{param}_{k}" for k in range(len(gens))]
    refs = [ParamRef(nm) for nm in names]
    if strategy == "tableau":
        if kind == "singles_block":
            circ = compile_singles_block(*idx, refs, n_q)
        else:
            circ = compile_generator_tableau(gens[0], refs[0], n_q)
    else:
        circ = Circuit(n_q)
        for g, r in zip(gens, refs):
            circ = circ.compose(synthesize_generator_naive(g, r, n_q))
    return circ, L, formula


# -- commands ------------------------------------------------------------------------


def cmd_pool(args, out) -> int:
    if args.kind == "sd":
        if args.n_occ is None or args.n_virt is None:
            raise CliError("sd pools need --n-occ and --n-virt")
        pool = build_pool_sd(args.n_occ, args.n_virt)
    elif args.kind == "generalized":
        if args.n_orbitals is None:
            raise CliError("generalized pools need --n-orbitals (spin-orbitals)")
        pool = build_pool_generalized(args.n_orbitals, args.rank)
    else:
        if args.n_orbitals is None:
            raise CliError("pair-gsd pools need --n-orbitals (spatial orbitals)")
        pool = build_pool_pair_gsd(args.n_orbitals)
    if args.spin_screen:
        pool = screen_spin(pool)
    text = format_pool(pool)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        _report(out, generators=len(pool), singles=len(pool.singles), doubles=len(pool.doubles))
    else:
        out.write(text)
    return EXIT_OK


def cmd_screen(args, out) -> int:
    h = _hamiltonian(args)
    ref = _reference(args, h.n_qubits)
    ranked = qcc_screen(h, ref)
    top = ranked if args.top is None else ranked[: args.top]
    for rank, (p, g) in enumerate(top, start=1):
        _report(out, rank=rank, gradient=g, string=str(p))
    return EXIT_OK


def cmd_compile(args, out) -> int:
    kind, idx = _generator_job(args)
    circ, L, formula = _compile_job(kind, idx, args.strategy, args.n_qubits, args.param)
    if args.angle is not None:
        circ = circ.bind({p: args.angle for p in circ.parameters})
    if args.format == "qasm":
        if not circ.is_bound:
            raise CliError("QASM output needs numeric angles (--angle)")
        text = circ.to_qasm()
    else:
        text = format_circuit(circ)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    count = circ.two_qubit_count()
    if formula is None:
        _report(out, two_qubit_count=count)
    else:
        out.write(f"two_qubit_count={formula} L={L} value={count}\n")
    return EXIT_OK


def cmd_count(args, out) -> int:
    if args.pool:
        if args.n_qubits is None:
            raise CliError("--pool needs --n-qubits")
        pool = _in_file(args.pool, parse_pool)
        counts = {}
        for strategy in ("naive", "tableau"):
            spec = AnsatzSpec(
                pool,
                args.n_qubits,
                0,
                ordering=args.ordering,
                trotter_number=args.trotter,
                repetitions=args.repetitions,
                seed=args.seed,
            )
            counts[strategy] = build_ansatz(spec, strategy=strategy).two_qubit_count()
        _report(out, naive=counts["naive"], tableau=counts["tableau"])
        return EXIT_OK
    kind, idx = _generator_job(args)
    naive, L, _ = _compile_job(kind, idx, "naive", args.n_qubits, "theta")
    tab, _, _ = _compile_job(kind, idx, "tableau", args.n_qubits, "theta")
    items = {"naive": naive.two_qubit_count(), "tableau": tab.two_qubit_count()}
    if L is not None:
        items["L"] = L
    _report(out, **items)
    return EXIT_OK


def cmd_check_equiv(args, out) -> int:
    a = _in_file(args.first, parse_circuit)
    b = _in_file(args.second, parse_circuit)
    if a.n_qubits != b.n_qubits:
        raise CliError(f"circuits act on {a.n_qubits} and {b.n_qubits} qubits")
    names = list(dict.fromkeys(a.parameters + b.parameters))
    rng = np.random.default_rng(args.seed)
    values = _params(args.params, names) if args.params else {}
    for nm in names:
        values.setdefault(nm, float(rng.uniform(-np.pi, np.pi)))
    ua = circuit_to_unitary(a.bind(values, strict=False))
    ub = circuit_to_unitary(b.bind(values, strict=False))
    dist = phase_distance(ua, ub)
    ok = dist <= args.tol
    out.write(f"equivalent={fmt(ok)} tol={args.tol:g}\n")
    _report(out, distance=dist)
    return EXIT_OK if ok else EXIT_FALSE


def _vqe_config(args) -> VQEConfig:
    return VQEConfig(
        gtol=args.gtol, max_iterations=args.max_iterations, restarts=args.restarts, seed=args.seed
    )


def cmd_vqe(args, out) -> int:
    h = _hamiltonian(args)
    spec = _spec(args, h)
    res = vqe_minimize(h, spec, _vqe_config(args))
    _report(
        out,
        energy=res.energy,
        converged=res.converged,
        iterations=res.iterations,
        gradient_norm=res.gradient_norm,
        n_params=len(res.parameters),
    )
    out.write("parameters=" + ",".join(fmt(x) for x in res.parameters) + "\n")
    if args.circuit_out:
        circ = build_ansatz(spec, strategy=args.strategy)
        with open(args.circuit_out, "w", encoding="utf-8") as fh:
            fh.write(format_circuit(circ))
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_adapt(args, out) -> int:
    h = _hamiltonian(args)
    ref = _reference(args, h.n_qubits)
    pool = _pool(args, h, ref)
    cfg = AdaptConfig(
        pool_tol=args.pool_tol, max_operators=args.max_operators, vqe=_vqe_config(args)
    )
    res = adapt_vqe(h, pool, cfg, n_qubits=h.n_qubits, reference=ref)
    _report(out, iteration=0, energy=res.energies[0])
    for k, op in enumerate(res.operators, start=1):
        _report(out, iteration=k, operator=str(op).replace(" ", ""), energy=res.energies[k],
                max_gradient=res.max_gradients[k - 1])
    _report(
        out,
        energy=res.energy,
        operators=len(res.operators),
        final_max_gradient=res.max_gradients[-1] if res.max_gradients else 0.0,
        stop_reason=res.stop_reason,
        converged=res.converged,
    )
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_pqe(args, out, err) -> int:
    h = _hamiltonian(args)
    spec = _spec(args, h)
    cfg = PQEConfig(residual_tol=args.residual_tol, max_iterations=args.max_iterations)
    try:
        res = pqe_solve(h, spec, cfg)
    except DivergenceError as exc:
        err.write(f"error: {exc}\n")
        trace = exc.trace
        _report(out, converged=False, iterations=len(trace) - 1, residual_norm=trace[-1])
        return EXIT_NOT_CONVERGED
    _report(
        out,
        energy=res.energy,
        converged=res.converged,
        iterations=res.iterations,
        max_residual=float(np.max(np.abs(res.residuals))),
    )
    out.write("parameters=" + ",".join(fmt(x) for x in res.parameters) + "\n")
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_qpe(args, out) -> int:
    h = _hamiltonian(args)
    trial = _in_file(args.trial, parse_circuit) if args.trial else Circuit(h.n_qubits)
    if not trial.is_bound:
        trial = trial.bind(_params(args.params, trial.parameters))
    outcome = qpe_run(h, trial, args.bits, args.time, shift=args.shift, scale=args.scale)
    out.write(" ".join(f"P({k})={fmt(v)}" for k, v in outcome.distribution.items()) + "\n")
    best = outcome.most_likely()
    _report(out, most_likely=best, energy=outcome.decode(best))
    return EXIT_OK


def cmd_dress(args, out) -> int:
    h = _hamiltonian(args)
    if len(args.entangler) != len(args.angle):
        raise CliError("give one --angle per --entangler")
    chosen = []
    for text, theta in zip(args.entangler, args.angle):
        try:
            chosen.append((PauliString.from_str(text, h.n_qubits), theta))
        except ValueError as exc:
            raise CliError(f"bad entangler {text!r}: {exc}") from None
    dressed = iqcc_step(h, chosen)
    text = format_pauli_sum(dressed, precision=12)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(format_pauli_sum(dressed))
        _report(out, terms=len(dressed), input_terms=len(h))
    else:
        out.write(text)
    return EXIT_OK


def cmd_energy(args, out) -> int:
    h = _hamiltonian(args)
    e, _ = exact_ground_state(h)
    _report(out, ground_energy=e, n_qubits=h.n_qubits, terms=len(h))
    return EXIT_OK


def cmd_expect(args, out) -> int:
    h = _hamiltonian(args)
    circ = _in_file(args.circuit, parse_circuit) if args.circuit else Circuit(h.n_qubits)
    if circ.n_qubits != h.n_qubits:
        raise CliError(f"circuit has {circ.n_qubits} qubits, Hamiltonian {h.n_qubits}")
    if args.reference is not None:
        circ = build_reference(_reference(args, h.n_qubits), h.n_qubits).compose(circ)
    circ = circ.bind(_params(args.params, circ.parameters))
    psi = apply_circuit(zero_state(h.n_qubits), circ)
    _report(out, expectation=expectation(psi, h))
    return EXIT_OK


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="ucc-forge", description="UCC ansatz construction, compilation and solvers.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pool", help="enumerate an excitation pool")
    p.add_argument("kind", choices=("sd", "generalized", "pair-gsd"))
    p.add_argument("--n-occ", type=int, help="occupied spatial orbitals (sd)")
    p.add_argument("--n-virt", type=int, help="virtual spatial orbitals (sd)")
    p.add_argument("--n-orbitals", type=int, help="spin-orbitals (generalized) or spatial (pair-gsd)")
    p.add_argument("--rank", type=int, default=2, help="excitation rank for generalized pools")
    p.add_argument("--spin-screen", action="store_true", help="drop spin-changing excitations")
    p.add_argument("--output", help="write the pool here and print a summary")
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("screen", help="rank QCC entanglers by energy gradient")
    _add_hamiltonian_args(p)
    p.add_argument("--reference", help="occupied spin-orbitals, e.g. 0,1")
    p.add_argument("--top", type=int, help="print only the first N")
    p.set_defaults(func=cmd_screen)

    for name, helptext in (("compile", "compile one excitation block"),
                           ("count", "two-qubit gate counts, naive vs tableau")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--double", help="i,j,a,b with i<j<a<b")
        p.add_argument("--single", help="i,a")
        p.add_argument("--singles-block", help="i,ibar,a,abar (four grouped singles)")
        p.add_argument("--n-qubits", type=int, help="register size (default: max index + 1)")
        if name == "compile":
            p.add_argument("--strategy", choices=("naive", "tableau"), default="tableau")
            p.add_argument("--param", default="theta", help="parameter name (default theta)")
            p.add_argument("--angle", type=float, help="bind every parameter to this value")
            p.add_argument("--format", choices=("text", "qasm"), default="text")
            p.add_argument("--output", help="write the circuit here instead of stdout")
            p.set_defaults(func=cmd_compile)
        else:
            p.add_argument("--pool", help="count a whole ansatz built from this pool file")
            p.add_argument(
                "--ordering", choices=("doubles-first", "as-given", "random"),
                default="doubles-first",
            )
            p.add_argument("--trotter", type=int, default=1)
            p.add_argument("--repetitions", type=int, default=1)
            p.add_argument("--seed", type=int, default=0)
            p.set_defaults(func=cmd_count)

    p = sub.add_parser("check-equiv", help="unitary equivalence of two circuit files")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--tol", type=float, default=1e-10, help="Frobenius tolerance (default 1e-10)")
    p.add_argument("--params", help="parameter values; unset ones are drawn from --seed")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_equiv)

    for name, helptext in (("vqe", "variational minimization"), ("adapt", "ADAPT-VQE"),
                           ("pqe", "projective eigensolver")):
        p = sub.add_parser(name, help=helptext)
        _add_hamiltonian_args(p)
        _add_ansatz_args(p, qcc=name != "pqe")
        if name == "pqe":
            p.add_argument("--residual-tol", type=float, default=1e-8)
            p.add_argument("--max-iterations", type=int, default=200)
            p.set_defaults(func=cmd_pqe)
            continue
        p.add_argument("--gtol", type=float, default=1e-6, help="gradient-norm tolerance")
        p.add_argument("--max-iterations", type=int, default=500)
        p.add_argument("--restarts", type=int, default=0)
        if name == "vqe":
            p.add_argument("--strategy", choices=("naive", "tableau"), default="naive")
            p.add_argument("--circuit-out", help="write the parametric ansatz circuit here")
            p.set_defaults(func=cmd_vqe)
        else:
            p.add_argument("--pool-tol", type=float, default=1e-5)
            p.add_argument("--max-operators", type=int, default=50)
            p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("qpe", help="exact phase-estimation distribution")
    _add_hamiltonian_args(p)
    p.add_argument("--bits", type=int, required=True, help="energy register size m")
    p.add_argument("--trial", help="circuit file preparing the trial state from |0...0>")
    p.add_argument("--params", help="values for symbolic trial parameters")
    p.add_argument("--time", type=float, default=np.pi, help="evolution time t (default pi)")
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=cmd_qpe)

    p = sub.add_parser("dress", help="fold entanglers into the Hamiltonian")
    _add_hamiltonian_args(p)
    p.add_argument("--entangler", action="append", default=[], help='Pauli string, e.g. "X0 Y1"')
    p.add_argument("--angle", action="append", type=float, default=[])
    p.add_argument("--output", help="write the dressed sum here (full precision)")
    p.set_defaults(func=cmd_dress)

    p = sub.add_parser("energy", help="exact ground energy by dense diagonalization")
    _add_hamiltonian_args(p)
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("expect", help="expectation value on a circuit state")
    _add_hamiltonian_args(p)
    p.add_argument("--circuit", help="circuit file applied to |0...0> (after --reference)")
    p.add_argument("--reference", help="prepend X gates on these qubits")
    p.add_argument("--params", help="values for symbolic parameters")
    p.set_defaults(func=cmd_expect)
    return top


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "pqe":
            return args.func(args, out, err)
        return args.func(args, out)
    except (CliError, ContractError, DimensionError, DegenerateInputError, SizeLimitError,
            ParseError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_CONTRACT
    except UnboundParameterError as exc:
        err.write(f"error: unbound parameter {exc.args[0]}\n")
        return EXIT_CONTRACT
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
