"""Exception types shared across the package."""

from __future__ import annotations


class DimensionError(ValueError):
    """Operands act on different numbers of qubits (or have mismatched shapes)."""


class ContractError(ValueError):
    """An input violates a documented precondition (hermiticity, ordering, range)."""


class DegenerateInputError(ValueError):
    """The input is valid but describes a trivial object (e.g. an identity string)."""


class UnboundParameterError(KeyError):
    """A symbolic circuit parameter was needed numerically but has no value."""


class SizeLimitError(ValueError):
    """A dense operation would exceed the configured qubit cap."""


class ParseError(ValueError):
    """Malformed text input. ``lineno`` is 1-based, or ``None`` if not line-specific."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class DivergenceError(RuntimeError):
    """An iterative solver was aborted by its divergence guard.

    The partial iteration history is kept on ``trace``.
    """

    def __init__(self, message: str, trace: list | None = None):
        super().__init__(message)
        self.trace = trace if trace is not None else []
