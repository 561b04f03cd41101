"""Gate-level circuit IR with symbolic parameters, and naive Pauli-exponential synthesis.

Rotation conventions: ``Rx(t) = exp(-i t X/2)``, ``Ry(t) = exp(-i t Y/2)``,
``Rz(t) = exp(-i t Z/2) = diag(exp(-i t/2), exp(i t/2))``.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .exceptions import ContractError, DegenerateInputError, DimensionError, ParseError
from .exceptions import UnboundParameterError
from .fermion import ExcitationGenerator, encode_generator
from .pauli import PauliString

ONE_QUBIT = ("H", "S", "Sdg", "X", "Rx", "Ry", "Rz")
TWO_QUBIT = ("CX", "CZ")
ROTATIONS = ("Rx", "Ry", "Rz")
KINDS = ONE_QUBIT + TWO_QUBIT
_INVERSE = {"H": "H", "S": "Sdg", "Sdg": "S", "X": "X", "CX": "CX", "CZ": "CZ"}


@dataclass(frozen=True)
class ParamRef:
    """Symbolic angle ``multiplier * <name>``."""

    name: str
    multiplier: float = 1.0

    def __post_init__(self):
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_\.\[\]]*", self.name):
            raise ValueError(f"invalid parameter name {self.name!r}")
        object.__setattr__(self, "multiplier", float(self.multiplier))

    def __mul__(self, factor: float) -> ParamRef:
        return ParamRef(self.name, self.multiplier * float(factor))

    __rmul__ = __mul__

    def __neg__(self) -> ParamRef:
        return ParamRef(self.name, -self.multiplier)

    def __truediv__(self, factor: float) -> ParamRef:
        return ParamRef(self.name, self.multiplier / float(factor))

    def value(self, bindings: Mapping[str, float]) -> float:
        try:
            return self.multiplier * float(bindings[self.name])
        except KeyError:
            raise UnboundParameterError(self.name) from None

    def __str__(self) -> str:
        if self.multiplier == 1.0:
            return self.name
        if self.multiplier == -1.0:
            return f"-{self.name}"
        return f"{self.multiplier!r}*{self.name}"


Angle = float | ParamRef


def _as_angle(angle) -> Angle:
    if isinstance(angle, ParamRef):
        return angle
    if isinstance(angle, str):
        return ParamRef(angle)
    return float(angle)


@dataclass(frozen=True)
class Gate:
    """One gate. Rotation kinds carry an angle; two-qubit kinds act on ``(control, target)``."""

    kind: str
    qubits: tuple[int, ...]
    angle: Angle | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"unknown gate kind {self.kind!r}")
        qs = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qs)
        arity = 2 if self.kind in TWO_QUBIT else 1
        if len(qs) != arity:
            raise ContractError(f"{self.kind} acts on {arity} qubit(s), got {qs}")
        if arity == 2 and qs[0] == qs[1]:
            raise ContractError(f"{self.kind} needs two distinct qubits")
        if any(q < 0 for q in qs):
            raise ContractError("qubit indices must be non-negative")
        if self.kind in ROTATIONS:
            if self.angle is None:
                raise ContractError(f"{self.kind} needs an angle")
            object.__setattr__(self, "angle", _as_angle(self.angle))
        elif self.angle is not None:
            raise ContractError(f"{self.kind} takes no angle")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT

    @property
    def is_symbolic(self) -> bool:
        return isinstance(self.angle, ParamRef)

    def inverse(self) -> Gate:
        if self.kind in ROTATIONS:
            return Gate(self.kind, self.qubits, -self.angle)
        return Gate(_INVERSE[self.kind], self.qubits)

    def bind(self, bindings: Mapping[str, float], strict: bool = True) -> Gate:
        if not isinstance(self.angle, ParamRef):
            return self
        if not strict and self.angle.name not in bindings:
            return self
        return Gate(self.kind, self.qubits, self.angle.value(bindings))

    def numeric_angle(self) -> float:
        if isinstance(self.angle, ParamRef):
            raise UnboundParameterError(self.angle.name)
        return self.angle

    def to_text(self) -> str:
        qs = ",".join(map(str, self.qubits))
        if self.angle is None:
            return f"{self.kind.lower()} {qs}"
        ang = self.angle if isinstance(self.angle, ParamRef) else repr(float(self.angle))
        return f"{self.kind.lower()} {qs} {ang}"


@dataclass(frozen=True)
class Circuit:
    """Immutable ordered gate list on ``n_qubits`` qubits.

    ``parameters`` lists every symbolic name in first-use order (plus any
    declared but unused names).
    """

    n_qubits: int
    gates: tuple[Gate, ...] = ()
    parameters: tuple[str, ...] = field(default=())

    def __post_init__(self):
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        for g in gates:
            if max(g.qubits) >= self.n_qubits:
                raise DimensionError(f"gate {g.to_text()} exceeds {self.n_qubits} qubits")
        names = list(dict.fromkeys(self.parameters))
        seen = set(names)
        for g in gates:
            if isinstance(g.angle, ParamRef) and g.angle.name not in seen:
                seen.add(g.angle.name)
                names.append(g.angle.name)
        object.__setattr__(self, "parameters", tuple(names))

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    @property
    def is_bound(self) -> bool:
        return not any(g.is_symbolic for g in self.gates)

    def compose(self, other: Circuit) -> Circuit:
        """``self`` followed by ``other``."""
        if other.n_qubits != self.n_qubits:
            raise DimensionError(f"qubit counts differ: {self.n_qubits} vs {other.n_qubits}")
        return Circuit(self.n_qubits, self.gates + other.gates, self.parameters + other.parameters)

    def __add__(self, other: Circuit) -> Circuit:
        return self.compose(other)

    def inverse(self) -> Circuit:
        return Circuit(self.n_qubits, tuple(g.inverse() for g in reversed(self.gates)), self.parameters)

    def bind(self, values: Mapping[str, float] | Sequence[float], *, strict: bool = True) -> Circuit:
        """Substitute parameter values.

        Args:
            values: Mapping by name, or a sequence aligned with ``parameters``.
            strict: Require every parameter to be bound.

        Raises:
            UnboundParameterError: a parameter is missing and ``strict``.
            DimensionError: sequence length differs from the parameter count.
        """
        if not isinstance(values, Mapping):
            values = list(values)
            if len(values) != len(self.parameters):
                raise DimensionError(
                    f"got {len(values)} values for {len(self.parameters)} parameters"
                )
            values = dict(zip(self.parameters, values))
        remaining = () if strict else tuple(p for p in self.parameters if p not in values)
        return Circuit(
            self.n_qubits, tuple(g.bind(values, strict) for g in self.gates), remaining
        )

    bind_parameters = bind

    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if g.is_two_qubit)

    def count_ops(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.kind] = out.get(g.kind, 0) + 1
        return out

    def depth(self) -> int:
        """Greedy layer count: each gate starts after the last gate on any of its qubits."""
        level = [0] * self.n_qubits
        for g in self.gates:
            d = max(level[q] for q in g.qubits) + 1
            for q in g.qubits:
                level[q] = d
        return max(level, default=0)

    def to_text(self) -> str:
        return format_circuit(self)

    def to_qasm(self) -> str:
        return to_qasm(self)


# -- text formats ------------------------------------------------------------------


def format_circuit(c: Circuit) -> str:
    """Line format: ``qubits N``, optional ``params a b ...``, then one gate per line."""
    lines = [f"qubits {c.n_qubits}"]
    if c.parameters:
        lines.append("params " + " ".join(c.parameters))
    lines += [g.to_text() for g in c.gates]
    return "\n".join(lines) + "\n"


_KIND_BY_NAME = {k.lower(): k for k in KINDS}
_PARAM_ANGLE = re.compile(r"^(?:([-+]?[0-9.eE+-]+)\*)?(-?)([A-Za-z_][A-Za-z0-9_\.\[\]]*)$")


def _parse_angle(tok: str, lineno: int) -> Angle:
    try:
        return float(tok)
    except ValueError:
        pass
    m = _PARAM_ANGLE.match(tok)
    if m is None:
        raise ParseError(f"bad angle {tok!r}", lineno)
    mult = float(m.group(1)) if m.group(1) else 1.0
    if m.group(2):
        mult = -mult
    return ParamRef(m.group(3), mult)


def parse_circuit(text: str) -> Circuit:
    """Inverse of :func:`format_circuit`. ``#`` comments and blank lines are ignored."""
    n = None
    params: list[str] = []
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        head = toks[0].lower()
        if head == "qubits":
            if n is not None or len(toks) != 2 or not toks[1].isdigit():
                raise ParseError("expected a single 'qubits <n>' header", lineno)
            n = int(toks[1])
            continue
        if head == "params":
            params.extend(toks[1:])
            continue
        if n is None:
            raise ParseError("gate before 'qubits' header", lineno)
        if head not in _KIND_BY_NAME:
            raise ParseError(f"unknown gate {toks[0]!r}", lineno)
        kind = _KIND_BY_NAME[head]
        want = 3 if kind in ROTATIONS else 2
        if len(toks) != want:
            raise ParseError(f"{kind} expects {want - 1} field(s)", lineno)
        try:
            qubits = tuple(int(q) for q in toks[1].split(","))
        except ValueError:
            raise ParseError(f"bad qubit list {toks[1]!r}", lineno) from None
        angle = _parse_angle(toks[2], lineno) if kind in ROTATIONS else None
        try:
            gate = Gate(kind, qubits, angle)
        except ContractError as exc:
            raise ParseError(str(exc), lineno) from None
        if max(gate.qubits) >= n:
            raise ParseError(f"qubit index exceeds declared {n} qubits", lineno)
        gates.append(gate)
    if n is None:
        raise ParseError("missing 'qubits <n>' header")
    return Circuit(n, tuple(gates), tuple(params))


def to_qasm(c: Circuit) -> str:
    """OpenQASM 2.0 text using ``qelib1.inc`` gate names. Requires a bound circuit.

    Raises:
        UnboundParameterError: a gate angle is still symbolic.
    """
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.n_qubits}];"]
    for g in c.gates:
        name = g.kind.lower()
        args = ",".join(f"q[{q}]" for q in g.qubits)
        if g.kind in ROTATIONS:
            lines.append(f"{name}({g.numeric_angle()!r}) {args};")
        else:
            lines.append(f"{name} {args};")
    return "\n".join(lines) + "\n"


# -- synthesis ---------------------------------------------------------------------


def _basis_in(p: PauliString) -> list[Gate]:
    out = []
    for q in p.support:
        op = p.op(q)
        if op == "X":
            out.append(Gate("H", (q,)))
        elif op == "Y":
            out.append(Gate("Rx", (q,), math.pi / 2))
    return out


def _basis_out(p: PauliString) -> list[Gate]:
    out = []
    for q in p.support:
        op = p.op(q)
        if op == "X":
            out.append(Gate("H", (q,)))
        elif op == "Y":
            out.append(Gate("Rx", (q,), -math.pi / 2))
    return out


def synthesize_pauli_evolution(p: PauliString, angle) -> Circuit:
    """Circuit for ``exp(-i angle/2 P)``.

    Basis changes map X (via H) and Y (via ``Rx(pi/2)``) to Z, an ascending
    CX ladder accumulates the parity on the highest support qubit, where
    ``Rz(angle)`` acts, and the ladder and basis changes are then undone.

    Raises:
        ContractError: ``p`` does not carry phase +1.
        DegenerateInputError: ``p`` is the identity.
    """
    if p.phase != 0:
        raise ContractError("evolution string must have phase +1")
    if p.is_identity():
        raise DegenerateInputError("identity string only contributes a global phase")
    support = p.support
    ladder = [Gate("CX", (a, b)) for a, b in zip(support, support[1:])]
    gates = (
        _basis_in(p)
        + ladder
        + [Gate("Rz", (support[-1],), _as_angle(angle))]
        + ladder[::-1]
        + _basis_out(p)
    )
    return Circuit(p.n_qubits, tuple(gates))


def generator_rotations(g: ExcitationGenerator, n: int) -> list[tuple[PauliString, float]]:
    """``(P_r, m_r)`` so that ``exp(theta/2 A) = prod_r exp(-i m_r theta/2 P_r)``.

    The encoded generator is ``A = sum_r i alpha_r P_r``, hence ``m_r = -alpha_r``.
    Strings come in canonical ``(x, z)`` order.
    """
    enc = encode_generator(g, n)
    return [(p, -c.imag) for p, c in enc.items_sorted()]


def synthesize_generator_naive(g: ExcitationGenerator, param, n_qubits: int) -> Circuit:
    """Exact circuit for ``exp(theta/2 A_pq)`` as a product of Pauli evolutions.

    ``param`` may be a number, a parameter name, or a :class:`ParamRef`.
    The subterms commute, so no Trotter error is incurred.
    """
    theta = _as_angle(param)
    out = Circuit(n_qubits)
    for p, m in generator_rotations(g, n_qubits):
        out = out.compose(synthesize_pauli_evolution(p, theta * m))
    return out


def build_reference(occupied: int | Iterable[int], n: int) -> Circuit:
    """X gates preparing the determinant with the given occupied modes from ``|0...0>``."""
    if isinstance(occupied, int):
        if occupied < 0 or occupied >= 1 << n:
            raise DimensionError(f"occupation mask does not fit {n} qubits")
        modes = [q for q in range(n) if occupied >> q & 1]
    else:
        modes = sorted(set(occupied))
        if modes and (modes[0] < 0 or modes[-1] >= n):
            raise DimensionError(f"occupied mode out of range for {n} qubits")
    return Circuit(n, tuple(Gate("X", (q,)) for q in modes))


def occupation_mask(occupied: Iterable[int]) -> int:
    mask = 0
    for q in occupied:
        mask |= 1 << q
    return mask
