"""Fermionic excitation generators, pools, Jordan-Wigner encoding and screening.

Spin-orbitals are interleaved: spatial orbital ``p`` owns index ``2p``
(alpha) and ``2p + 1`` (beta). The Jordan-Wigner map places mode ``k`` on
qubit ``k`` with occupied = ``|1>`` and the parity string on qubits above
the site::

    a+_k = 1/2 (X_k - i Y_k) Z_{k+1} ... Z_{n-1}
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import ContractError, DimensionError, ParseError
from .pauli import PauliString, PauliSum

ALPHA, BETA = 0, 1


# -- generators -----------------------------------------------------------------


@dataclass(frozen=True, order=True)
class ExcitationGenerator:
    """Antihermitian generator ``A_pq = prod_k a+_{p_k} a_{q_k} - h.c.``.

    For an excitation of occupied ``(i, j)`` into virtual ``(a, b)`` pass
    ``creation=(a, b)`` and ``annihilation=(i, j)``; the operator then equals
    ``a+_a a+_b a_j a_i - h.c.``.

    Attributes:
        creation: Strictly increasing spin-orbital indices created.
        annihilation: Strictly increasing spin-orbital indices annihilated.
    """

    creation: tuple[int, ...]
    annihilation: tuple[int, ...]

    def __post_init__(self):
        p = tuple(int(v) for v in self.creation)
        q = tuple(int(v) for v in self.annihilation)
        object.__setattr__(self, "creation", p)
        object.__setattr__(self, "annihilation", q)
        if len(p) != len(q) or not p:
            raise ContractError("creation and annihilation tuples must share a nonzero length")
        for t in (p, q):
            if any(b <= a for a, b in zip(t, t[1:])):
                raise ContractError(f"indices must be strictly increasing, got {t}")
            if t[0] < 0:
                raise ContractError("indices must be non-negative")
        if set(p) & set(q):
            raise ContractError(f"index collision between {p} and {q}")

    @classmethod
    def single(cls, i: int, a: int) -> ExcitationGenerator:
        """Excitation ``i -> a``."""
        return cls((a,), (i,))

    @classmethod
    def double(cls, i: int, j: int, a: int, b: int) -> ExcitationGenerator:
        """Excitation ``(i, j) -> (a, b)``; each pair is sorted first."""
        return cls(tuple(sorted((a, b))), tuple(sorted((i, j))))

    @property
    def rank(self) -> int:
        return len(self.creation)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.creation + self.annihilation))

    @property
    def max_index(self) -> int:
        return max(self.creation + self.annihilation)

    def canonical_key(self) -> tuple:
        return (self.annihilation, self.creation)

    def __str__(self) -> str:
        return f"{','.join(map(str, self.annihilation))}->{','.join(map(str, self.creation))}"


PoolEntry = ExcitationGenerator | PauliString

ORIGINS = ("SD", "generalized", "pair-GSD", "qubit", "custom")


@dataclass(frozen=True)
class ExcitationPool:
    """Ordered, duplicate-free list of generators; order fixes the Trotter order."""

    generators: tuple[PoolEntry, ...]
    origin: str = "custom"

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if len(set(gens)) != len(gens):
            raise ContractError("pool contains duplicate generators")
        if not (self.origin in ORIGINS or self.origin.startswith("generalized-")):
            raise ContractError(f"unknown pool origin {self.origin!r}")

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, idx):
        return self.generators[idx]

    @property
    def singles(self) -> list[ExcitationGenerator]:
        return [g for g in self.generators if isinstance(g, ExcitationGenerator) and g.rank == 1]

    @property
    def doubles(self) -> list[ExcitationGenerator]:
        return [g for g in self.generators if isinstance(g, ExcitationGenerator) and g.rank == 2]

    def filter(self, keep) -> ExcitationPool:
        return ExcitationPool(tuple(g for g in self.generators if keep(g)), self.origin)


def _canonical(gens: Iterable[ExcitationGenerator], doubles_first: bool) -> tuple:
    gens = sorted(set(gens), key=lambda g: (g.rank, g.canonical_key()))
    by_rank: dict[int, list] = {}
    for g in gens:
        by_rank.setdefault(g.rank, []).append(g)
    ranks = sorted(by_rank, reverse=doubles_first)
    return tuple(g for r in ranks for g in by_rank[r])


def build_pool_sd(
    n_occ: int,
    n_virt: int,
    *,
    doubles_first: bool = True,
    active: Iterable[int] | None = None,
) -> ExcitationPool:
    """All occupied-to-virtual singles and doubles for a closed-shell reference.

    ``n_occ`` and ``n_virt`` count spatial orbitals, so spin-orbitals
    ``0 .. 2 n_occ - 1`` are occupied. No spin restriction is applied here;
    use :func:`screen_spin` to drop spin-flipping excitations.

    Args:
        n_occ: Number of doubly occupied spatial orbitals.
        n_virt: Number of virtual spatial orbitals.
        doubles_first: Put doubles before singles in the returned order.
        active: Optional spin-orbital indices; others are removed before
            enumeration.

    Raises:
        ContractError: negative sizes, or ``n_virt`` zero with ``n_occ`` positive.
    """
    if n_occ < 0 or n_virt < 0:
        raise ContractError("orbital counts must be non-negative")
    if n_occ == 0:
        return ExcitationPool((), "SD")
    if n_virt == 0:
        raise ContractError("need at least one virtual orbital")
    occ = list(range(2 * n_occ))
    virt = list(range(2 * n_occ, 2 * (n_occ + n_virt)))
    return build_pool_from_orbitals(occ, virt, doubles_first=doubles_first, active=active)


def build_pool_from_orbitals(
    occupied: Sequence[int],
    virtual: Sequence[int],
    *,
    doubles_first: bool = True,
    active: Iterable[int] | None = None,
) -> ExcitationPool:
    """Singles and doubles from explicit occupied and virtual spin-orbital lists."""
    if active is not None:
        mask = set(active)
        occupied = [i for i in occupied if i in mask]
        virtual = [a for a in virtual if a in mask]
    if set(occupied) & set(virtual):
        raise ContractError("occupied and virtual sets overlap")
    occupied, virtual = sorted(occupied), sorted(virtual)
    gens = [ExcitationGenerator((a,), (i,)) for i in occupied for a in virtual]
    gens += [
        ExcitationGenerator(ab, ij)
        for ij in itertools.combinations(occupied, 2)
        for ab in itertools.combinations(virtual, 2)
    ]
    return ExcitationPool(_canonical(gens, doubles_first), "SD")


def build_pool_generalized(n_spin_orbitals: int, rank: int) -> ExcitationPool:
    """Every rank-``n`` generator over ``n_spin_orbitals`` modes, one per sign pair.

    ``A_pq`` and ``A_qp = -A_pq`` describe the same rotation, so only the
    member with ``annihilation < creation`` lexicographically is kept.
    """
    if rank < 1 or n_spin_orbitals < 2 * rank:
        raise ContractError("need at least 2*rank spin-orbitals")
    gens = []
    for q in itertools.combinations(range(n_spin_orbitals), rank):
        rest = [k for k in range(n_spin_orbitals) if k not in q]
        for p in itertools.combinations(rest, rank):
            if q < p:
                gens.append(ExcitationGenerator(p, q))
    return ExcitationPool(_canonical(gens, True), f"generalized-{rank}")


def build_pool_pair_gsd(n_spatial: int, *, doubles_first: bool = True) -> ExcitationPool:
    """Generalized spin-conserving singles plus paired doubles.

    For spatial ``r < s`` this yields the singles ``a+_{s sigma} a_{r sigma} - h.c.``
    for both spins and the pair double
    ``a+_{s alpha} a_{r alpha} a+_{s beta} a_{r beta} - h.c.``.
    """
    if n_spatial < 2:
        raise ContractError("pair pools need at least two spatial orbitals")
    gens = []
    for r, s in itertools.combinations(range(n_spatial), 2):
        for spin in (ALPHA, BETA):
            gens.append(ExcitationGenerator((2 * s + spin,), (2 * r + spin,)))
        gens.append(ExcitationGenerator((2 * s, 2 * s + 1), (2 * r, 2 * r + 1)))
    return ExcitationPool(_canonical(gens, doubles_first), "pair-GSD")


# -- Jordan-Wigner ----------------------------------------------------------------


@lru_cache(maxsize=4096)
def jw_ladder(k: int, n: int, kind: str = "creation") -> PauliSum:
    """Jordan-Wigner image of ``a+_k`` (``kind="creation"``) or ``a_k``.

    Raises:
        DimensionError: ``k`` outside ``[0, n)``.
        ValueError: unknown ``kind``.
    """
    if not 0 <= k < n:
        raise DimensionError(f"site {k} out of range for {n} qubits")
    if kind not in ("creation", "annihilation"):
        raise ValueError(f"kind must be 'creation' or 'annihilation', got {kind!r}")
    zmask = ((1 << n) - 1) & ~((1 << (k + 1)) - 1)
    bit = 1 << k
    sign = -1 if kind == "creation" else 1
    return PauliSum(n, {(bit, zmask): 0.5, (bit, zmask | bit): 0.5j * sign})


def number_operator(n: int, modes: Iterable[int] | None = None) -> PauliSum:
    """``sum_k a+_k a_k`` over ``modes`` (default all), i.e. ``sum_k (1 - Z_k)/2``."""
    modes = range(n) if modes is None else modes
    terms: dict[tuple[int, int], complex] = {}
    for k in modes:
        if not 0 <= k < n:
            raise DimensionError(f"mode {k} out of range for {n} qubits")
        terms[(0, 0)] = terms.get((0, 0), 0.0) + 0.5
        terms[(0, 1 << k)] = terms.get((0, 1 << k), 0.0) - 0.5
    return PauliSum(n, terms)


def _ladder_product(ops: Sequence[tuple[int, str]], n: int) -> PauliSum:
    out = PauliSum.identity(n)
    for k, kind in ops:
        out = out * jw_ladder(k, n, kind)
    return out


@lru_cache(maxsize=4096)
def _encode_cached(p: tuple[int, ...], q: tuple[int, ...], n: int) -> PauliSum:
    ops = [op for pk, qk in zip(p, q) for op in ((pk, "creation"), (qk, "annihilation"))]
    forward = _ladder_product(ops, n)
    return forward - forward.adjoint()


def encode_generator(g: ExcitationGenerator, n: int) -> PauliSum:
    """Jordan-Wigner image of ``A_pq``: purely imaginary coefficients on commuting strings.

    Raises:
        DimensionError: an index is ``>= n``.
    """
    if g.max_index >= n:
        raise DimensionError(f"generator {g} needs more than {n} qubits")
    return _encode_cached(g.creation, g.annihilation, n)


def _sparse_items(table, rank: int) -> list[tuple[tuple[int, ...], complex]]:
    if table is None:
        return []
    if isinstance(table, Mapping):
        items = [(tuple(int(i) for i in k), complex(v)) for k, v in table.items()]
    else:
        arr = np.asarray(table)
        if arr.ndim != rank:
            raise DimensionError(f"expected a rank-{rank} coefficient table")
        items = [(tuple(int(i) for i in idx), complex(arr[idx])) for idx in zip(*np.nonzero(arr))]
    for k, _ in items:
        if len(k) != rank:
            raise DimensionError(f"coefficient key {k} should have {rank} indices")
    return [(k, v) for k, v in items if v != 0]


def check_hermitian_tables(one_body, two_body, tol: float = 1e-10) -> None:
    """Raise :class:`ContractError` unless ``h_pq = h_qp*`` and ``h_pqrs = h_srqp*``."""
    for rank, table in ((2, one_body), (4, two_body)):
        data = dict(_sparse_items(table, rank))
        for k, v in data.items():
            partner = data.get(tuple(reversed(k)), 0.0)
            if abs(v - np.conj(partner)) > tol:
                raise ContractError(f"coefficient table is not Hermitian at index {k}")


def encode_hamiltonian(
    one_body,
    two_body,
    n: int,
    constant: float = 0.0,
    *,
    check: bool = True,
) -> PauliSum:
    """Jordan-Wigner image of ``c + sum h_pq a+_p a_q + sum h_pqrs a+_p a+_q a_r a_s``.

    Tables may be dense arrays or mappings from index tuples to values.

    Raises:
        ContractError: the tables are not Hermitian (when ``check``).
        DimensionError: an index is ``>= n``.
    """
    if check:
        check_hermitian_tables(one_body, two_body)
    acc = PauliSum.identity(n, constant) if constant else PauliSum.zero(n)
    terms: dict[tuple[int, int], complex] = dict(acc.terms)

    def add(sum_: PauliSum, coeff: complex):
        for key, c in sum_.terms.items():
            terms[key] = terms.get(key, 0.0) + coeff * c

    for (p, q), v in _sparse_items(one_body, 2):
        if max(p, q) >= n:
            raise DimensionError(f"index {(p, q)} out of range for {n} qubits")
        add(_ladder_product([(p, "creation"), (q, "annihilation")], n), v)
    for (p, q, r, s), v in _sparse_items(two_body, 4):
        if max(p, q, r, s) >= n:
            raise DimensionError(f"index {(p, q, r, s)} out of range for {n} qubits")
        if p == q or r == s:
            continue
        ops = [(p, "creation"), (q, "creation"), (r, "annihilation"), (s, "annihilation")]
        add(_cached_two_body(tuple(ops), n), v)
    out = PauliSum(n, terms, tol=1e-12)
    if check and not out.is_hermitian():
        raise ContractError("encoded Hamiltonian is not Hermitian")
    if check:
        out = PauliSum(n, {k: v.real for k, v in out.terms.items()})
    return out


@lru_cache(maxsize=100_000)
def _cached_two_body(ops: tuple, n: int) -> PauliSum:
    return _ladder_product(ops, n)


# -- spin and spatial symmetry -----------------------------------------------------


def spin_of(index: int) -> int:
    """``ALPHA`` (0) or ``BETA`` (1) under the interleaved layout."""
    return index % 2


def spatial_of(index: int) -> int:
    return index // 2


def _spin_balanced(g: ExcitationGenerator, spin) -> bool:
    def alpha_count(idx):
        return sum(1 for k in idx if spin(k) == ALPHA)

    return alpha_count(g.creation) == alpha_count(g.annihilation)


def screen_spin(pool: ExcitationPool, spin_layout=spin_of) -> ExcitationPool:
    """Keep generators that conserve the number of alpha and beta electrons.

    ``spin_layout`` maps a spin-orbital index to 0 (alpha) or 1 (beta); it may
    be a callable or a sequence. Qubit-pool entries pass unchanged.

    Raises:
        ContractError: the layout yields a label other than 0 or 1.
    """
    spin = spin_layout if callable(spin_layout) else spin_layout.__getitem__

    def checked(k):
        s = spin(k)
        if s not in (ALPHA, BETA):
            raise ContractError(f"unknown spin label {s!r} for orbital {k}")
        return s

    return pool.filter(
        lambda g: not isinstance(g, ExcitationGenerator) or _spin_balanced(g, checked)
    )


@dataclass(frozen=True)
class PointGroup:
    """Abelian point group given by its irrep labels and product table."""

    name: str
    irreps: tuple[str, ...]
    table: Mapping[tuple[str, str], str] = field(repr=False)

    @classmethod
    def from_rows(cls, name: str, irreps: Sequence[str], rows: Sequence[Sequence[str]]):
        table = {(a, b): rows[i][j] for i, a in enumerate(irreps) for j, b in enumerate(irreps)}
        return cls(name, tuple(irreps), table)

    @property
    def identity(self) -> str:
        return self.irreps[0]

    def product(self, a: str, b: str) -> str:
        try:
            return self.table[(a, b)]
        except KeyError:
            bad = a if a not in self.irreps else b
            raise ContractError(f"irrep {bad!r} is not in {self.name}") from None


C2V = PointGroup.from_rows(
    "C2v",
    ["A1", "A2", "B1", "B2"],
    [
        ["A1", "A2", "B1", "B2"],
        ["A2", "A1", "B2", "B1"],
        ["B1", "B2", "A1", "A2"],
        ["B2", "B1", "A2", "A1"],
    ],
)

D2H = PointGroup.from_rows(
    "D2h",
    ["Ag", "Au", "B1g", "B2g", "B3g", "B1u", "B2u", "B3u"],
    [
        ["Ag", "Au", "B1g", "B2g", "B3g", "B1u", "B2u", "B3u"],
        ["Au", "Ag", "B1u", "B2u", "B3u", "B1g", "B2g", "B3g"],
        ["B1g", "B1u", "Ag", "B3g", "B2g", "Au", "B3u", "B2u"],
        ["B2g", "B2u", "B3g", "Ag", "B1g", "B3u", "Au", "B1u"],
        ["B3g", "B3u", "B2g", "B1g", "Ag", "B2u", "B1u", "Au"],
        ["B1u", "B1g", "Au", "B3u", "B2u", "Ag", "B3g", "B2g"],
        ["B2u", "B2g", "B3u", "Au", "B1u", "B3g", "Ag", "B1g"],
        ["B3u", "B3g", "B2u", "B1u", "Au", "B2g", "B1g", "Ag"],
    ],
)

POINT_GROUPS = {"C2v": C2V, "D2h": D2H}


def irrep_product(g: PointGroup, a: str, b: str) -> str:
    """Direct product of two irreps of ``g``."""
    return g.product(a, b)


@dataclass(frozen=True)
class OrbitalSymmetryMap:
    """Irrep label per spatial orbital under the interleaved spin layout."""

    labels: tuple[str, ...]

    def irrep(self, spin_orbital: int) -> str:
        return self.labels[spatial_of(spin_orbital)]

    def of(self, g: PointGroup, indices: Iterable[int]) -> str:
        """Product irrep ``s_e`` of a set of spin-orbitals."""
        out = g.identity
        for k in indices:
            out = g.product(out, self.irrep(k))
        return out


def screen_orbital(pool: ExcitationPool, sym: OrbitalSymmetryMap, g: PointGroup) -> ExcitationPool:
    """Keep generators whose created and annihilated orbitals share an irrep product.

    Raises:
        ContractError: an orbital is unlabeled or carries a label outside ``g``.
    """
    for label in sym.labels:
        if label not in g.irreps:
            raise ContractError(f"irrep {label!r} is not in {g.name}")

    def keep(gen):
        if not isinstance(gen, ExcitationGenerator):
            return True
        if spatial_of(gen.max_index) >= len(sym.labels):
            raise ContractError(f"orbital {spatial_of(gen.max_index)} has no irrep label")
        return sym.of(g, gen.creation) == sym.of(g, gen.annihilation)

    return pool.filter(keep)


# -- file formats ----------------------------------------------------------------


@dataclass(frozen=True)
class Integrals:
    """Second-quantized Hamiltonian tables over ``n_orbitals`` spin-orbitals."""

    n_orbitals: int
    constant: float
    one_body: dict[tuple[int, int], float]
    two_body: dict[tuple[int, int, int, int], float]

    def to_pauli(self) -> PauliSum:
        return encode_hamiltonian(self.one_body, self.two_body, self.n_orbitals, self.constant)


def parse_integrals(text: str) -> Integrals:
    """Parse ``norb <n>`` followed by ``0 c``, ``1 p q v`` and ``2 p q r s v`` lines.

    Repeated index tuples accumulate. ``#`` starts a comment.

    Raises:
        ParseError: malformed line, missing header, or index out of range.
    """
    n = None
    constant = 0.0
    one: dict[tuple[int, int], float] = {}
    two: dict[tuple[int, int, int, int], float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "norb":
            if n is not None or len(toks) != 2:
                raise ParseError("expected a single 'norb <n>' header", lineno)
            try:
                n = int(toks[1])
            except ValueError:
                raise ParseError(f"bad orbital count {toks[1]!r}", lineno) from None
            if n <= 0:
                raise ParseError("orbital count must be positive", lineno)
            continue
        if n is None:
            raise ParseError("data before 'norb' header", lineno)
        sizes = {"0": 0, "1": 2, "2": 4}
        if toks[0] not in sizes or len(toks) != sizes[toks[0]] + 2:
            raise ParseError(f"unrecognized line {line!r}", lineno)
        try:
            idx = tuple(int(t) for t in toks[1:-1])
            val = float(toks[-1])
        except ValueError:
            raise ParseError(f"bad number in {line!r}", lineno) from None
        if any(not 0 <= i < n for i in idx):
            raise ParseError(f"index out of range for norb {n}", lineno)
        if toks[0] == "0":
            constant += val
        elif toks[0] == "1":
            one[idx] = one.get(idx, 0.0) + val
        else:
            two[idx] = two.get(idx, 0.0) + val
    if n is None:
        raise ParseError("missing 'norb <n>' header")
    return Integrals(n, constant, one, two)


def format_integrals(ints: Integrals) -> str:
    lines = [f"norb {ints.n_orbitals}"]
    if ints.constant:
        lines.append(f"0 {ints.constant:.17g}")
    lines += [f"1 {p} {q} {v:.17g}" for (p, q), v in sorted(ints.one_body.items())]
    lines += [f"2 {p} {q} {r} {s} {v:.17g}" for (p, q, r, s), v in sorted(ints.two_body.items())]
    return "\n".join(lines) + "\n"


def parse_pool(text: str, origin: str = "custom") -> ExcitationPool:
    """Parse one generator per line written ``q1,q2->p1,p2`` (annihilated -> created)."""
    gens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.count("->") != 1:
            raise ParseError(f"expected 'p,q->r,s', got {line!r}", lineno)
        left, right = line.split("->")
        try:
            q = tuple(int(t) for t in left.split(","))
            p = tuple(int(t) for t in right.split(","))
        except ValueError:
            raise ParseError(f"bad index in {line!r}", lineno) from None
        try:
            gens.append(ExcitationGenerator(tuple(sorted(p)), tuple(sorted(q))))
        except ContractError as exc:
            raise ParseError(str(exc), lineno) from None
    try:
        return ExcitationPool(tuple(gens), origin)
    except ContractError as exc:
        raise ParseError(str(exc)) from None


def format_pool(pool: ExcitationPool) -> str:
    lines = [str(g) for g in pool]
    return "\n".join(lines) + ("\n" if lines else "")
