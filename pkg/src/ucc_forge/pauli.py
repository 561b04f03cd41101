"""Pauli strings and sums in the symplectic (x, z) bit representation.

A string on ``n`` qubits is stored as two integer bitmasks plus a phase
exponent. Bit ``q`` of ``x``/``z`` describes qubit ``q``::

    (x, z) = (0, 0) -> I,  (1, 0) -> X,  (0, 1) -> Z,  (1, 1) -> Y

and the operator is ``i**phase`` times the tensor product of those single-qubit
Paulis (``Y`` itself, not ``XZ``). Dense matrices use the big-endian ket
convention: basis index ``b = sum_q b_q 2**q`` so qubit 0 is the rightmost
ket label.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

import numpy as np

from .exceptions import ContractError, DimensionError, ParseError

PRUNE_TOL = 1e-12

_CODE = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_PHASE_PREFIX = ("", "i ", "- ", "-i ")
_TOKEN = re.compile(r"^([IXYZ])(\d+)$")


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """A Pauli string ``i**phase * P_0 (x) P_1 (x) ...``.

    Attributes:
        n_qubits: Number of qubits.
        x: Bitmask of qubits carrying X or Y.
        z: Bitmask of qubits carrying Z or Y.
        phase: Exponent of ``i``, always reduced mod 4.
    """

    n_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be non-negative")
        limit = 1 << self.n_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise DimensionError(f"bitmasks exceed {self.n_qubits} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # -- construction -----------------------------------------------------

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls(n_qubits)

    @classmethod
    def from_ops(
        cls, n_qubits: int, ops: Mapping[int, str] | Iterable[tuple[int, str]], phase: int = 0
    ) -> PauliString:
        """Build a string from ``{qubit: "X"|"Y"|"Z"|"I"}``."""
        items = ops.items() if isinstance(ops, Mapping) else ops
        x = z = 0
        for q, letter in items:
            if not 0 <= q < n_qubits:
                raise DimensionError(f"qubit {q} out of range for {n_qubits} qubits")
            if (x | z) >> q & 1:
                raise ValueError(f"qubit {q} given twice")
            bx, bz = _CODE[letter.upper()]
            x |= bx << q
            z |= bz << q
        return cls(n_qubits, x, z, phase)

    @classmethod
    def from_str(cls, text: str, n_qubits: int | None = None) -> PauliString:
        """Parse ``"X0 Y2 Z3"`` (qubit indices 0-based). Empty text is the identity."""
        ops = []
        for tok in text.split():
            m = _TOKEN.match(tok)
            if m is None:
                raise ValueError(f"bad Pauli token {tok!r}")
            ops.append((int(m.group(2)), m.group(1)))
        if n_qubits is None:
            n_qubits = max((q for q, _ in ops), default=-1) + 1
        return cls.from_ops(n_qubits, [(q, p) for q, p in ops if p != "I"])

    # -- inspection -------------------------------------------------------

    @property
    def key(self) -> tuple[int, int]:
        """Phase-free identity of the string, used as a :class:`PauliSum` key."""
        return (self.x, self.z)

    @property
    def x_bits(self) -> np.ndarray:
        return np.array([(self.x >> q) & 1 for q in range(self.n_qubits)], dtype=np.uint8)

    @property
    def z_bits(self) -> np.ndarray:
        return np.array([(self.z >> q) & 1 for q in range(self.n_qubits)], dtype=np.uint8)

    @property
    def support(self) -> tuple[int, ...]:
        mask = self.x | self.z
        return tuple(q for q in range(self.n_qubits) if mask >> q & 1)

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def y_count(self) -> int:
        return _popcount(self.x & self.z)

    def op(self, qubit: int) -> str:
        return _LETTER[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def sort_key(self) -> tuple[int, int]:
        """Canonical order: ascending ``(x, z)`` bitmask integers."""
        return (self.x, self.z)

    # -- algebra ----------------------------------------------------------

    def with_phase(self, phase: int) -> PauliString:
        return PauliString(self.n_qubits, self.x, self.z, phase)

    def adjoint(self) -> PauliString:
        return self.with_phase(-self.phase)

    def __neg__(self) -> PauliString:
        return self.with_phase(self.phase + 2)

    def __mul__(self, other):
        if isinstance(other, PauliString):
            return multiply(self, other)
        if isinstance(other, PauliSum):
            return PauliSum.from_string(self) * other
        return NotImplemented

    def commutes(self, other: PauliString) -> bool:
        return commutes(self, other)

    def to_matrix(self) -> np.ndarray:
        """Dense ``2**n x 2**n`` matrix."""
        return _string_matrix(self.n_qubits, self.x, self.z, self.phase)

    def __str__(self) -> str:
        body = " ".join(f"{self.op(q)}{q}" for q in self.support) or "I"
        return _PHASE_PREFIX[self.phase] + body


def _check_sizes(a, b):
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Product ``a * b`` with the exact accumulated phase.

    Per qubit, writing ``P(x, z) = i**(x z) X**x Z**z`` the product picks up
    ``i**(x1 z1 + x2 z2 - x3 z3) (-1)**(z1 x2)`` where ``(x3, z3)`` is the XOR.
    """
    _check_sizes(a, b)
    x3 = a.x ^ b.x
    z3 = a.z ^ b.z
    e = (
        a.phase
        + b.phase
        + _popcount(a.x & a.z)
        + _popcount(b.x & b.z)
        + 2 * _popcount(a.z & b.x)
        - _popcount(x3 & z3)
    )
    return PauliString(a.n_qubits, x3, z3, e)


def symplectic_product(a: PauliString, b: PauliString) -> int:
    """Parity of the number of qubits where ``a`` and ``b`` anticommute."""
    _check_sizes(a, b)
    return (_popcount(a.x & b.z) + _popcount(a.z & b.x)) & 1


def commutes(a: PauliString, b: PauliString) -> bool:
    return symplectic_product(a, b) == 0


def _string_matrix(n: int, x: int, z: int, phase: int) -> np.ndarray:
    dim = 1 << n
    cols = np.arange(dim, dtype=np.int64)
    rows = cols ^ x
    vals = _column_factors(n, x, z, phase, cols)
    m = np.zeros((dim, dim), dtype=complex)
    m[rows, cols] = vals
    return m


def _column_factors(n: int, x: int, z: int, phase: int, cols: np.ndarray) -> np.ndarray:
    # P|b> = i**(phase + #Y) (-1)**popcount(z & b) |b ^ x>
    parity = np.zeros(cols.shape, dtype=np.int64)
    zb = cols & z
    for q in range(n):
        if z >> q & 1:
            parity ^= (zb >> q) & 1
    base = 1j ** ((phase + _popcount(x & z)) % 4)
    return base * (1 - 2 * parity)


def apply_string(p: PauliString, state: np.ndarray, coeff: complex = 1.0) -> np.ndarray:
    """Return ``coeff * P |state>`` without forming a matrix."""
    dim = state.shape[0]
    cols = np.arange(dim, dtype=np.int64)
    out = np.empty_like(state, dtype=complex)
    out[cols ^ p.x] = coeff * _column_factors(p.n_qubits, p.x, p.z, p.phase, cols) * state
    return out


class PauliSum:
    """Immutable complex linear combination of Pauli strings.

    Keys are phase-free ``(x, z)`` pairs denoting the Hermitian string with
    ``Y`` for ``(1, 1)`` bits; any string phase is folded into the coefficient.
    Coefficients with magnitude below ``tol`` are dropped on construction.
    """

    __slots__ = ("_n", "_terms")

    def __init__(
        self,
        n_qubits: int,
        terms: Mapping[tuple[int, int], complex] | None = None,
        tol: float = PRUNE_TOL,
    ):
        self._n = int(n_qubits)
        limit = 1 << self._n
        clean: dict[tuple[int, int], complex] = {}
        for (x, z), c in (terms or {}).items():
            if not (0 <= x < limit and 0 <= z < limit):
                raise DimensionError(f"term {(x, z)} exceeds {self._n} qubits")
            c = complex(c)
            if abs(c) >= tol:
                clean[(x, z)] = c
        self._terms = clean

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, n_qubits: int) -> PauliSum:
        return cls(n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> PauliSum:
        return cls(n_qubits, {(0, 0): coeff})

    @classmethod
    def from_string(cls, p: PauliString, coeff: complex = 1.0) -> PauliSum:
        return cls(p.n_qubits, {p.key: coeff * 1j**p.phase})

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[tuple[PauliString, complex]]) -> PauliSum:
        acc: dict[tuple[int, int], complex] = {}
        for p, c in terms:
            if p.n_qubits != n_qubits:
                raise DimensionError("term qubit count differs from sum")
            acc[p.key] = acc.get(p.key, 0.0) + c * 1j**p.phase
        return cls(n_qubits, acc)

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None) -> PauliSum:
        return parse_pauli_sum(text, n_qubits)

    # -- inspection -------------------------------------------------------

    @property
    def n_qubits(self) -> int:
        return self._n

    @property
    def terms(self) -> dict[tuple[int, int], complex]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[PauliString, complex]]:
        for (x, z), c in self._terms.items():
            yield PauliString(self._n, x, z), c

    def items_sorted(self) -> list[tuple[PauliString, complex]]:
        return sorted(self, key=lambda t: t[0].sort_key())

    def coefficient(self, p: PauliString) -> complex:
        """Coefficient of the Hermitian string with ``p``'s bits (phase ignored)."""
        return self._terms.get(p.key, 0.0)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def is_antihermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.real) <= tol for c in self._terms.values())

    def constant(self) -> complex:
        return self._terms.get((0, 0), 0.0)

    def norm1(self) -> float:
        return float(sum(abs(c) for c in self._terms.values()))

    # -- algebra ----------------------------------------------------------

    def _coerce(self, other) -> PauliSum:
        if isinstance(other, PauliSum):
            other_sum = other
        elif isinstance(other, PauliString):
            other_sum = PauliSum.from_string(other)
        else:
            raise TypeError(f"cannot combine PauliSum with {type(other).__name__}")
        if other_sum.n_qubits != self._n:
            raise DimensionError(f"qubit counts differ: {self._n} vs {other_sum.n_qubits}")
        return other_sum

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = PauliSum.identity(self._n, other)
        other = self._coerce(other)
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0.0) + c
        return PauliSum(self._n, acc)

    __radd__ = __add__

    def __neg__(self) -> PauliSum:
        return PauliSum(self._n, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            return self + (-other)
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor: complex) -> PauliSum:
        return PauliSum(self._n, {k: factor * c for k, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(complex(other))
        other = self._coerce(other)
        acc: dict[tuple[int, int], complex] = {}
        n = self._n
        for (x1, z1), c1 in self._terms.items():
            p1 = PauliString(n, x1, z1)
            for (x2, z2), c2 in other._terms.items():
                prod = multiply(p1, PauliString(n, x2, z2))
                acc[prod.key] = acc.get(prod.key, 0.0) + c1 * c2 * 1j**prod.phase
        return PauliSum(n, acc)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(complex(other))
        if isinstance(other, PauliString):
            return PauliSum.from_string(other) * self
        return NotImplemented

    def __truediv__(self, other):
        return self.scale(1.0 / complex(other))

    def adjoint(self) -> PauliSum:
        return PauliSum(self._n, {k: c.conjugate() for k, c in self._terms.items()})

    def simplify(self, tol: float = PRUNE_TOL) -> PauliSum:
        return PauliSum(self._n, self._terms, tol=tol)

    def allclose(self, other: PauliSum, tol: float = 1e-10) -> bool:
        diff = self - other
        return all(abs(c) <= tol for c in diff._terms.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return hash((self._n, frozenset(self._terms.items())))

    # -- dense ------------------------------------------------------------

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self._n
        m = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim, dtype=np.int64)
        for (x, z), c in self._terms.items():
            m[cols ^ x, cols] += c * _column_factors(self._n, x, z, 0, cols)
        return m

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Return ``H |state>`` for a dense state vector of length ``2**n``."""
        if state.shape[0] != 1 << self._n:
            raise DimensionError("state length does not match qubit count")
        out = np.zeros(state.shape[0], dtype=complex)
        for p, c in self:
            out += apply_string(p, state, c)
        return out

    # -- text -------------------------------------------------------------

    def to_text(self, precision: int = 17) -> str:
        return format_pauli_sum(self, precision)

    def __repr__(self) -> str:
        body = ", ".join(f"{c:.6g}*[{p}]" for p, c in self.items_sorted()[:6])
        more = "" if len(self) <= 6 else f", ... ({len(self)} terms)"
        return f"PauliSum(n_qubits={self._n}, {body}{more})"


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    return a * b - b * a


def anticommutator(a: PauliSum, b: PauliSum) -> PauliSum:
    return a * b + b * a


def xy_commutator_prefactor(a: PauliString, b: PauliString) -> complex:
    """Closed-form prefactor of ``[A, B] = c * (A B with phase dropped)``.

    Valid only for strings consisting of X and Y on the same support. Returns
    ``(-1)**(nyA - cy) * (1 - (-1)**(nyB - nyA)) * i**(N - cx - cy)``, where
    ``N - cx - cy`` counts the qubits on which the letters differ. Each such
    qubit contributes ``XY = iZ`` or ``YX = -iZ``, so the base is ``+i``.
    """
    if a.n_qubits != b.n_qubits or (a.x | a.z) != (b.x | b.z) or (a.x | a.z) != a.x:
        raise ContractError("prefactor formula needs X/Y strings on a common support")
    if b.x != (b.x | b.z):
        raise ContractError("prefactor formula needs X/Y strings on a common support")
    support = a.x
    n = _popcount(support)
    ny_a = a.y_count
    ny_b = b.y_count
    cy = _popcount(a.z & b.z)
    cx = _popcount(support & ~a.z & ~b.z)
    return (-1) ** (ny_a - cy) * (1 - (-1) ** (ny_b - ny_a)) * 1j ** (n - cx - cy)


def dress(h: PauliSum, p: PauliString, theta: float) -> PauliSum:
    """Conjugate ``h`` by a Pauli rotation: ``exp(i theta P/2) h exp(-i theta P/2)``.

    Terms commuting with ``P`` pass through; each anticommuting term ``T``
    becomes ``cos(theta) T + i sin(theta) P T``.

    Raises:
        ContractError: ``p`` carries a non-real phase or ``h`` is not Hermitian
            (``p`` with phase -1 is accepted and treated as ``-P``).
    """
    if p.n_qubits != h.n_qubits:
        raise DimensionError("string and sum act on different qubit counts")
    if not p.is_hermitian():
        raise ContractError("dressing string must be Hermitian (phase +1 or -1)")
    if not h.is_hermitian():
        raise ContractError("dressing requires a Hermitian sum")
    if p.is_identity():
        return h
    c, s = math.cos(theta), math.sin(theta)
    n = h.n_qubits
    acc: dict[tuple[int, int], complex] = {}
    for (x, z), coeff in h._terms.items():
        t = PauliString(n, x, z)
        if commutes(p, t):
            acc[(x, z)] = acc.get((x, z), 0.0) + coeff
            continue
        acc[(x, z)] = acc.get((x, z), 0.0) + c * coeff
        prod = multiply(p, t)
        key = prod.key
        acc[key] = acc.get(key, 0.0) + 1j * s * coeff * 1j**prod.phase
    out = PauliSum(n, acc)
    # i P T is Hermitian for anticommuting P, T; clear rounding residue.
    return PauliSum(n, {k: v.real for k, v in out._terms.items()})


# -- text format -------------------------------------------------------------


def _parse_float(tok: str) -> float | None:
    try:
        return float(tok)
    except ValueError:
        return None


def parse_pauli_sum(text: str, n_qubits: int | None = None) -> PauliSum:
    """Parse the line format ``<real> [<imag>] <op><index> ...``.

    Blank lines and ``#`` comments are ignored. A line with only numbers is
    an identity term. ``n_qubits`` defaults to the largest index plus one.

    Raises:
        ParseError: with the offending 1-based line number.
    """
    parsed: list[tuple[list[tuple[int, str]], complex]] = []
    max_q = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        re_part = _parse_float(toks[0])
        if re_part is None:
            raise ParseError(f"expected a real coefficient, got {toks[0]!r}", lineno)
        rest = toks[1:]
        im_part = 0.0
        if rest:
            maybe = _parse_float(rest[0])
            if maybe is not None:
                im_part = maybe
                rest = rest[1:]
        ops = []
        seen = set()
        for tok in rest:
            m = _TOKEN.match(tok)
            if m is None:
                raise ParseError(f"bad Pauli token {tok!r}", lineno)
            q = int(m.group(2))
            if q in seen:
                raise ParseError(f"qubit {q} appears twice", lineno)
            seen.add(q)
            max_q = max(max_q, q)
            if m.group(1) != "I":
                ops.append((q, m.group(1)))
        parsed.append((ops, complex(re_part, im_part)))
    if n_qubits is None:
        n_qubits = max(max_q + 1, 1)
    elif max_q >= n_qubits:
        raise ParseError(f"qubit index {max_q} exceeds declared {n_qubits} qubits")
    terms = [(PauliString.from_ops(n_qubits, ops), c) for ops, c in parsed]
    return PauliSum.from_terms(n_qubits, terms)


def format_pauli_sum(h: PauliSum, precision: int = 17) -> str:
    lines = []
    for p, c in h.items_sorted():
        ops = " ".join(f"{p.op(q)}{q}" for q in p.support)
        num = f"{c.real:.{precision}g}"
        if c.imag != 0.0:
            num += f" {c.imag:.{precision}g}"
        lines.append(f"{num} {ops}".rstrip())
    return "\n".join(lines) + ("\n" if lines else "")
