"""Binary [X|Z|s] tableaus of commuting Pauli strings and a Clifford-reduced compiler.

A tableau row ``(x, z, s)`` stands for ``(-1)**s`` times the Hermitian Pauli
string with bits ``(x, z)`` (``(1, 1)`` is ``Y``). :func:`apply_clifford`
works in the direction ``T1 = C T2 C^dagger``: it returns ``T2 = C^dagger T1 C``.
Applying ``c_1, ..., c_m`` in turn therefore gives ``T_m = W^dagger T_0 W``
with ``W = c_1 c_2 ... c_m``, and a rotation about an original row is::

    exp(-i t/2 P) = W exp(-i t/2 P_m) W^dagger

which as a gate list is ``c_1^dagger ... c_m^dagger``, the rotation about
``P_m``, then ``c_m ... c_1``.
"""

from __future__ import annotations

import itertools
import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import Angle, Circuit, Gate, _as_angle, synthesize_pauli_evolution
from .exceptions import ContractError, DimensionError
from .fermion import ExcitationGenerator, encode_generator
from .pauli import PauliString, commutes

WORD = 64
CLIFFORD_KINDS = ("H", "S", "CX", "CZ")
# excitation blocks reduce to four local qubits; larger searches grow combinatorially
TEMPLATE_QUBITS = 4


class ParityWarning(UserWarning):
    """Parity factorization found a Z column it could not remove."""


@dataclass(frozen=True)
class CliffordOp:
    """One generator of the Clifford group used by the tableau compiler."""

    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in CLIFFORD_KINDS:
            raise ContractError(f"unknown Clifford kind {self.kind!r}")
        qs = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qs)
        arity = 2 if self.kind in ("CX", "CZ") else 1
        if len(qs) != arity or len(set(qs)) != arity:
            raise ContractError(f"{self.kind} needs {arity} distinct qubit(s), got {qs}")

    def gate(self) -> Gate:
        return Gate(self.kind, self.qubits)

    def dagger_gate(self) -> Gate:
        return Gate("Sdg" if self.kind == "S" else self.kind, self.qubits)

    def __str__(self) -> str:
        return f"{self.kind}({','.join(map(str, self.qubits))})"


def H(q: int) -> CliffordOp:
    return CliffordOp("H", (q,))


def S(q: int) -> CliffordOp:
    return CliffordOp("S", (q,))


def CX(a: int, b: int) -> CliffordOp:
    return CliffordOp("CX", (a, b))


def CZ(a: int, b: int) -> CliffordOp:
    return CliffordOp("CZ", (a, b))


def broadcast(kind: str, qubits: Iterable[int]) -> list[CliffordOp]:
    """``H(*)`` / ``S(*)``: the one-qubit gate on each qubit, ascending."""
    return [CliffordOp(kind, (q,)) for q in sorted(qubits)]


# -- packed tableau --------------------------------------------------------------


def _pack(bits: np.ndarray, n_words: int) -> np.ndarray:
    rows, n = bits.shape
    out = np.zeros((rows, n_words), dtype=np.uint64)
    for q in range(n):
        col = bits[:, q].astype(np.uint64)
        out[:, q // WORD] |= col << np.uint64(q % WORD)
    return out


def _unpack(words: np.ndarray, n: int) -> np.ndarray:
    rows = words.shape[0]
    out = np.zeros((rows, n), dtype=np.uint8)
    for q in range(n):
        out[:, q] = (words[:, q // WORD] >> np.uint64(q % WORD)) & np.uint64(1)
    return out


class Tableau:
    """Rows of mutually commuting signed Pauli strings in packed binary form.

    ``X`` and ``Z`` are stored as ``(rows, words)`` arrays of ``uint64`` with
    qubit ``q`` at bit ``q % 64`` of word ``q // 64``; ``s`` holds sign bits.
    Instances are treated as immutable values.
    """

    __slots__ = ("n_qubits", "_x", "_z", "_s")

    def __init__(self, n_qubits: int, x, z, s, *, require_commuting: bool = True):
        x = np.asarray(x, dtype=np.uint8)
        z = np.asarray(z, dtype=np.uint8)
        s = np.asarray(s, dtype=np.uint8).reshape(-1)
        if x.ndim != 2 or x.shape != z.shape or x.shape[1] != n_qubits or s.shape[0] != x.shape[0]:
            raise DimensionError("X, Z must be rows x n_qubits and s must have one bit per row")
        if np.any(x > 1) or np.any(z > 1) or np.any(s > 1):
            raise ContractError("tableau entries must be bits")
        self.n_qubits = int(n_qubits)
        n_words = max(1, -(-self.n_qubits // WORD))
        self._x = _pack(x, n_words)
        self._z = _pack(z, n_words)
        self._s = s.copy()
        if require_commuting:
            self._check_commuting()

    @classmethod
    def _raw(cls, n: int, xw: np.ndarray, zw: np.ndarray, s: np.ndarray) -> Tableau:
        t = cls.__new__(cls)
        t.n_qubits = n
        t._x, t._z, t._s = xw, zw, s
        return t

    @classmethod
    def from_strings(cls, strings: Sequence[PauliString], *, require_commuting: bool = True):
        """Rows from strings with phase +1 or -1.

        Raises:
            ContractError: a string has an imaginary phase, or rows anticommute.
        """
        if not strings:
            raise ContractError("a tableau needs at least one row")
        n = strings[0].n_qubits
        if any(p.n_qubits != n for p in strings):
            raise DimensionError("rows act on different qubit counts")
        if any(p.phase % 2 for p in strings):
            raise ContractError("tableau rows must be Hermitian (phase +1 or -1)")
        x = np.array([p.x_bits for p in strings], dtype=np.uint8).reshape(len(strings), n)
        z = np.array([p.z_bits for p in strings], dtype=np.uint8).reshape(len(strings), n)
        s = np.array([p.phase // 2 for p in strings], dtype=np.uint8)
        return cls(n, x, z, s, require_commuting=require_commuting)

    def _check_commuting(self) -> None:
        rows = self.to_strings()
        for a, b in itertools.combinations(range(len(rows)), 2):
            if not commutes(rows[a], rows[b]):
                raise ContractError(f"tableau rows {a} and {b} anticommute")

    # -- access -------------------------------------------------------------

    @property
    def n_rows(self) -> int:
        return self._s.shape[0]

    @property
    def X(self) -> np.ndarray:
        return _unpack(self._x, self.n_qubits)

    @property
    def Z(self) -> np.ndarray:
        return _unpack(self._z, self.n_qubits)

    @property
    def s(self) -> np.ndarray:
        return self._s.copy()

    def x_col(self, q: int) -> np.ndarray:
        return ((self._x[:, q // WORD] >> np.uint64(q % WORD)) & np.uint64(1)).astype(np.uint8)

    def z_col(self, q: int) -> np.ndarray:
        return ((self._z[:, q // WORD] >> np.uint64(q % WORD)) & np.uint64(1)).astype(np.uint8)

    def row(self, r: int) -> PauliString:
        x = z = 0
        for w in range(self._x.shape[1]):
            x |= int(self._x[r, w]) << (WORD * w)
            z |= int(self._z[r, w]) << (WORD * w)
        return PauliString(self.n_qubits, x, z, 2 * int(self._s[r]))

    def to_strings(self) -> list[PauliString]:
        return [self.row(r) for r in range(self.n_rows)]

    def select(self, rows: Sequence[int]) -> Tableau:
        idx = np.asarray(rows, dtype=np.int64)
        return Tableau._raw(self.n_qubits, self._x[idx].copy(), self._z[idx].copy(), self._s[idx].copy())

    def bits(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Unpacked ``(X, Z, s)`` arrays."""
        return self.X, self.Z, self.s

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tableau):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and np.array_equal(self._x, other._x)
            and np.array_equal(self._z, other._z)
            and np.array_equal(self._s, other._s)
        )

    def __repr__(self) -> str:
        def fmt(r):
            return "".join(map(str, r))

        x, z, s = self.bits()
        body = "; ".join(f"{fmt(x[r])}|{fmt(z[r])}|{s[r]}" for r in range(self.n_rows))
        return f"Tableau({body})"

    def __str__(self) -> str:
        return "\n".join(str(p) for p in self.to_strings())

    # -- Clifford updates -------------------------------------------------------

    def apply(self, op: CliffordOp) -> Tableau:
        return apply_clifford(self, op)

    def apply_all(self, ops: Iterable[CliffordOp]) -> Tableau:
        t = self
        for op in ops:
            t = apply_clifford(t, op)
        return t


def _get(words: np.ndarray, q: int) -> np.ndarray:
    return (words[:, q // WORD] >> np.uint64(q % WORD)) & np.uint64(1)


def _put(words: np.ndarray, q: int, col: np.ndarray) -> None:
    w, b = q // WORD, np.uint64(q % WORD)
    words[:, w] = (words[:, w] & ~(np.uint64(1) << b)) | (col.astype(np.uint64) << b)


def apply_clifford(t: Tableau, c: CliffordOp) -> Tableau:
    """Conjugate every row: returns ``T2`` with ``T1 = C T2 C^dagger``.

    Raises:
        DimensionError: a gate qubit is outside the tableau.
    """
    if max(c.qubits) >= t.n_qubits:
        raise DimensionError(f"{c} exceeds {t.n_qubits} qubits")
    x, z, s = t._x.copy(), t._z.copy(), t._s.astype(np.uint64)
    one = np.uint64(1)
    if c.kind == "H":
        (a,) = c.qubits
        xa, za = _get(x, a), _get(z, a)
        s ^= xa & za
        _put(x, a, za)
        _put(z, a, xa)
    elif c.kind == "S":
        (a,) = c.qubits
        xa, za = _get(x, a), _get(z, a)
        s ^= xa & (za ^ one)
        _put(z, a, xa ^ za)
    elif c.kind == "CX":
        a, b = c.qubits
        xa, za, xb, zb = _get(x, a), _get(z, a), _get(x, b), _get(z, b)
        s ^= xa & zb & (xb ^ za ^ one)
        _put(z, a, za ^ zb)
        _put(x, b, xa ^ xb)
    else:
        a, b = c.qubits
        xa, za, xb, zb = _get(x, a), _get(z, a), _get(x, b), _get(z, b)
        s ^= xa & xb & (za ^ zb)
        _put(z, a, xb ^ za)
        _put(z, b, xa ^ zb)
    return Tableau._raw(t.n_qubits, x, z, s.astype(np.uint8))


# -- integer-row Clifford updates for small searches -------------------------------


def _conj_row(x: int, z: int, s: int, op: tuple) -> tuple[int, int, int]:
    kind = op[0]
    if kind == "H":
        a = op[1]
        xa, za = (x >> a) & 1, (z >> a) & 1
        s ^= xa & za
        x = (x & ~(1 << a)) | (za << a)
        z = (z & ~(1 << a)) | (xa << a)
    elif kind == "S":
        a = op[1]
        xa, za = (x >> a) & 1, (z >> a) & 1
        s ^= xa & (za ^ 1)
        z = (z & ~(1 << a)) | ((xa ^ za) << a)
    elif kind == "CX":
        a, b = op[1], op[2]
        xa, za, xb, zb = (x >> a) & 1, (z >> a) & 1, (x >> b) & 1, (z >> b) & 1
        s ^= xa & zb & (xb ^ za ^ 1)
        z ^= zb << a
        x ^= xa << b
    else:
        a, b = op[1], op[2]
        xa, za, xb, zb = (x >> a) & 1, (z >> a) & 1, (x >> b) & 1, (z >> b) & 1
        s ^= xa & xb & (za ^ zb)
        z ^= (xb << a) | (xa << b)
    return x, z, s


# -- parity factorization ---------------------------------------------------------


def _min_parity_set(x_rows: np.ndarray, active: Sequence[int], target: np.ndarray) -> tuple | None:
    """Smallest qubit set whose per-row X parity equals ``target``; prefers high indices."""
    cand = sorted(active, reverse=True)
    for size in range(1, len(cand) + 1):
        for combo in itertools.combinations(cand, size):
            par = np.bitwise_xor.reduce(x_rows[:, list(combo)], axis=1)
            if np.array_equal(par, target):
                return combo
    return None


def factor_parity(
    t: Tableau, clifford_seq: Sequence[CliffordOp] = ()
) -> tuple[Tableau, list[CliffordOp]]:
    """Remove Z-only parity columns shared across rows.

    Qubits on which no row carries X or Y are parity qubits. Those with an
    identical Z column are merged onto the highest one by an ascending CX
    ladder, and the merged column is cancelled with CZ gates to the fewest
    active qubits whose X parity reproduces it. The returned sequence extends
    ``clifford_seq``; applying it to the input gives the returned tableau.

    A parity column that no set of active qubits reproduces is left in place
    and reported with a :class:`ParityWarning`.
    """
    seq = list(clifford_seq)
    t = t.apply_all(clifford_seq)
    x, z, _ = t.bits()
    active = [q for q in range(t.n_qubits) if x[:, q].any()]
    groups: dict[bytes, list[int]] = {}
    for q in range(t.n_qubits):
        if not x[:, q].any() and z[:, q].any():
            groups.setdefault(z[:, q].tobytes(), []).append(q)
    for qubits in sorted(groups.values()):
        col = z[:, qubits[0]]
        chosen = _min_parity_set(x, active, col)
        if chosen is None:
            warnings.warn(
                f"parity column on qubits {qubits} is not an X-parity of the active qubits;"
                " left in place",
                ParityWarning,
                stacklevel=2,
            )
            continue
        ops = [CX(a, b) for a, b in zip(qubits, qubits[1:])]
        ops += [CZ(qubits[-1], q) for q in sorted(chosen)]
        t = t.apply_all(ops)
        seq += ops
    return t, seq


# -- diagonalization ------------------------------------------------------------------


def _single_z_targets(rows: Sequence[tuple[int, int, int]]) -> list[int] | None:
    targets = []
    for x, z, _ in rows:
        if x or z == 0 or z & (z - 1):
            return None
        targets.append(z.bit_length() - 1)
    if len(set(targets)) != len(targets):
        return None
    return targets


def _run(row: tuple[int, int, int], ops: Sequence[tuple]) -> tuple[int, int, int]:
    for op in ops:
        row = _conj_row(*row, op)
    return row


@lru_cache(maxsize=256)
def _template_search(rows: tuple[tuple[int, int, int], ...], k: int, max_cz: int) -> tuple | None:
    """Local search over ``[S(*)] CZ_A H(*) CZ_B S(*) H(*)`` by increasing CZ count."""
    pairs = list(itertools.combinations(range(k), 2))
    h_all = [("H", q) for q in range(k)]
    s_all = [("S", q) for q in range(k)]
    for total in range(max_cz + 1):
        for n_a in range(total + 1):
            for prefix in (False, True):
                for cz_a in itertools.combinations(pairs, n_a):
                    head = (s_all if prefix else []) + [("CZ", a, b) for a, b in cz_a] + h_all
                    mid = [_run(row, head) for row in rows]
                    for cz_b in itertools.combinations(pairs, total - n_a):
                        tail = [("CZ", a, b) for a, b in cz_b] + s_all + h_all
                        out = []
                        for row in mid:
                            row = _run(row, tail)
                            # reject early unless the row is a single Z
                            if row[0] or row[1] & (row[1] - 1) or row[1] == 0:
                                break
                            out.append(row)
                        else:
                            if _single_z_targets(out) is not None:
                                return tuple(head + tail)
    return None


def _local_rows(t: Tableau, support: Sequence[int]) -> tuple[tuple[int, int, int], ...]:
    x, z, s = t.bits()
    rows = []
    for r in range(t.n_rows):
        lx = sum(int(x[r, q]) << i for i, q in enumerate(support))
        lz = sum(int(z[r, q]) << i for i, q in enumerate(support))
        rows.append((lx, lz, int(s[r])))
    return tuple(rows)


def _generic_diagonalize(t: Tableau) -> list[CliffordOp]:
    """Clifford sequence turning commuting rows into Z-only rows.

    Independent rows become single ``Z`` on distinct qubits; dependent rows
    become products of those.
    """
    ops: list[CliffordOp] = []
    used: list[int] = []
    for r in range(t.n_rows):
        p = t.row(r)
        free = [q for q in range(t.n_qubits) if q not in used]
        xq = [q for q in free if p.x >> q & 1]
        if not xq:
            zq = [q for q in free if p.z >> q & 1]
            if not zq:
                continue  # dependent on earlier rows
            op = H(zq[0])
            ops.append(op)
            t = t.apply(op)
            p = t.row(r)
            xq = [zq[0]]
        q = xq[0]
        step = [CX(q, o) for o in range(t.n_qubits) if o != q and p.x >> o & 1]
        t = t.apply_all(step)
        ops += step
        p = t.row(r)
        step = [CZ(q, o) for o in range(t.n_qubits) if o != q and p.z >> o & 1]
        t = t.apply_all(step)
        ops += step
        p = t.row(r)
        if p.z >> q & 1:
            t = t.apply(S(q))
            ops.append(S(q))
        used.append(q)
    final = [H(q) for q in sorted(used)]
    return ops + final


def diagonalize(t: Tableau, max_template_cz: int = 6) -> list[CliffordOp]:
    """Clifford sequence mapping every row to a signed Z-only string.

    On supports of up to ``TEMPLATE_QUBITS`` qubits a layered template
    ``[S(*)] CZ_A H(*) CZ_B S(*) H(*)`` is tried first, with the fewest CZ
    gates that send each row to a single ``Z`` on its own qubit. Otherwise a
    general elimination is used.
    """
    x, z, _ = t.bits()
    support = [q for q in range(t.n_qubits) if x[:, q].any() or z[:, q].any()]
    if not support:
        return []
    if len(support) <= TEMPLATE_QUBITS and t.n_rows <= len(support):
        found = _template_search(_local_rows(t, support), len(support), max_template_cz)
        if found is not None:
            return [CliffordOp(op[0], tuple(support[i] for i in op[1:])) for op in found]
    return _generic_diagonalize(t)


# -- compilation ------------------------------------------------------------------------


@dataclass(frozen=True)
class Rotation:
    """``exp(-i angle/2 P)`` for a signed Hermitian Pauli string ``P``."""

    string: PauliString
    angle: Angle


def _emit_diagonal(n: int, row: PauliString, angle: Angle) -> list[Gate]:
    sign = -1.0 if row.phase == 2 else 1.0
    angle = angle * sign
    if row.weight == 1:
        return [Gate("Rz", (row.support[0],), angle)]
    return list(synthesize_pauli_evolution(row.with_phase(0), angle).gates)


def compile_rotations(
    n: int, rotations: Sequence[Rotation], groups: Sequence[Sequence[int]] | None = None
) -> Circuit:
    """Compile grouped Pauli rotations with one shared parity factorization.

    ``groups`` partitions the rotation indices into sets diagonalized
    together (default: a single group), applied in the order given. Strings
    must commute within a group; across groups they need not, since each
    group keeps its own diagonalize/undo sandwich.
    """
    if not rotations:
        return Circuit(n)
    strings = [r.string for r in rotations]
    groups = [list(range(len(rotations)))] if groups is None else [list(g) for g in groups]
    if sorted(i for g in groups for i in g) != list(range(len(rotations))):
        raise ContractError("groups must partition the rotations")
    for group in groups:
        Tableau.from_strings([strings[i] for i in group])
    tab = Tableau.from_strings(strings, require_commuting=False)
    reduced, parity_ops = factor_parity(tab)
    gates: list[Gate] = [op.dagger_gate() for op in parity_ops]
    for group in groups:
        sub = reduced.select(group)
        ops = diagonalize(sub)
        diag = sub.apply_all(ops)
        gates += [op.dagger_gate() for op in ops]
        for r, idx in enumerate(group):
            gates += _emit_diagonal(n, diag.row(r), rotations[idx].angle)
        gates += [op.gate() for op in reversed(ops)]
    gates += [op.gate() for op in reversed(parity_ops)]
    return Circuit(n, tuple(gates))


def generator_tableau_rotations(g: ExcitationGenerator, n: int, theta) -> list[Rotation]:
    """Rotations whose product is ``exp(theta/2 A)``, with coefficient signs in the rows.

    For ``A = sum_r i alpha_r P_r`` row ``r`` is ``sign(alpha_r) P_r`` with
    rotation angle ``-|alpha_r| theta``.
    """
    theta = _as_angle(theta)
    out = []
    for p, c in encode_generator(g, n).items_sorted():
        alpha = c.imag
        row = p if alpha > 0 else -p
        out.append(Rotation(row, theta * (-abs(alpha))))
    return out


def _y_parity_groups(rotations: Sequence[Rotation]) -> list[list[int]]:
    by: dict[int, list[int]] = {}
    for idx, r in enumerate(rotations):
        by.setdefault(r.string.y_count % 4, []).append(idx)
    return [by[k] for k in sorted(by)]


def compile_generator_tableau(g: ExcitationGenerator, param, n_qubits: int) -> Circuit:
    """Tableau-compiled ``exp(theta/2 A)`` for one excitation generator of any rank.

    Doubles are split into the one-Y and three-Y string groups.
    """
    rots = generator_tableau_rotations(g, n_qubits, param)
    groups = _y_parity_groups(rots) if g.rank == 2 else None
    return compile_rotations(n_qubits, rots, groups)


def parity_span_singles(i: int, ibar: int, a: int, abar: int) -> int:
    return a - ibar - 1


def parity_span_double(i: int, j: int, a: int, b: int) -> int:
    return (j - i - 1) + (b - a - 1)


def singles_block_generators(i: int, ibar: int, a: int, abar: int) -> list[ExcitationGenerator]:
    """Grouped singles in parameter order: ``i->a``, ``ibar->abar``, ``i->abar``, ``ibar->a``."""
    return [
        ExcitationGenerator.single(i, a),
        ExcitationGenerator.single(ibar, abar),
        ExcitationGenerator.single(i, abar),
        ExcitationGenerator.single(ibar, a),
    ]


def compile_singles_block(
    i: int, ibar: int, a: int, abar: int, params: Sequence, n_qubits: int | None = None
) -> Circuit:
    """Four grouped singles with one shared parity factorization.

    Implements ``prod_k exp(theta_k/2 A_k)`` over the generators of
    :func:`singles_block_generators`. The two same-spin and the two
    opposite-spin excitations are diagonalized as separate groups.

    Raises:
        ContractError: indices are not strictly increasing, or not four params.
    """
    if not i < ibar < a < abar:
        raise ContractError("singles block needs i < ibar < a < abar")
    if len(params) != 4:
        raise ContractError("singles block needs four parameters")
    n = abar + 1 if n_qubits is None else n_qubits
    rots: list[Rotation] = []
    groups: list[list[int]] = [[], []]
    for k, (gen, theta) in enumerate(zip(singles_block_generators(i, ibar, a, abar), params)):
        for r in generator_tableau_rotations(gen, n, theta):
            groups[k // 2].append(len(rots))
            rots.append(r)
    return compile_rotations(n, rots, groups)


def compile_double(i: int, j: int, a: int, b: int, param, n_qubits: int | None = None) -> Circuit:
    """Tableau-compiled double excitation ``(i, j) -> (a, b)``.

    Raises:
        ContractError: indices are not strictly increasing.
    """
    if not i < j < a < b:
        raise ContractError("double excitation needs i < j < a < b")
    n = b + 1 if n_qubits is None else n_qubits
    return compile_generator_tableau(ExcitationGenerator((a, b), (i, j)), param, n)
