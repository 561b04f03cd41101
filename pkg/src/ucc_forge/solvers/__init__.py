"""Energy-estimation drivers built on the ansatz, simulator and Pauli algebra."""

from __future__ import annotations

from .adapt import AdaptConfig, AdaptResult, adapt_vqe, pool_gradients
from .ansatz import Ansatz, AnsatzSpec, Slot, build_ansatz, order_pool, sparse_operator
from .pqe import PQEConfig, PQEResult, pqe_residuals, pqe_solve
from .qcc import (
    default_qcc_candidates,
    exchange_gate,
    exchange_gate_matrix,
    exchange_generator,
    iqcc_step,
    mean_field_rotation,
    qcc_gradient,
    qcc_screen,
)
from .qpe import QpeOutcome, qpe_run
from .vqe import (
    AnsatzObjective,
    CircuitObjective,
    VQEConfig,
    VQEResult,
    energy,
    gradient,
    make_objective,
    vqe_minimize,
)

__all__ = [
    "AdaptConfig",
    "AdaptResult",
    "Ansatz",
    "AnsatzObjective",
    "AnsatzSpec",
    "CircuitObjective",
    "PQEConfig",
    "PQEResult",
    "QpeOutcome",
    "Slot",
    "VQEConfig",
    "VQEResult",
    "adapt_vqe",
    "build_ansatz",
    "default_qcc_candidates",
    "energy",
    "exchange_gate",
    "exchange_gate_matrix",
    "exchange_generator",
    "gradient",
    "iqcc_step",
    "make_objective",
    "mean_field_rotation",
    "order_pool",
    "pool_gradients",
    "pqe_residuals",
    "pqe_solve",
    "qcc_gradient",
    "qcc_screen",
    "qpe_run",
    "sparse_operator",
    "vqe_minimize",
]
