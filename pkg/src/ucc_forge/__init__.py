"""UCC ansatz construction, Pauli algebra, tableau-based CNOT reduction and solvers.

Setting ``UCC_FORGE_THREADS`` before import caps the BLAS/OpenMP thread pools
used by the simulator.
"""

from __future__ import annotations

import os as _os

_threads = _os.environ.get("UCC_FORGE_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .circuit import (  # noqa: E402
    Circuit,
    Gate,
    ParamRef,
    build_reference,
    format_circuit,
    parse_circuit,
    synthesize_generator_naive,
    synthesize_pauli_evolution,
    to_qasm,
)
from .exceptions import (  # noqa: E402
    ContractError,
    DegenerateInputError,
    DimensionError,
    DivergenceError,
    ParseError,
    SizeLimitError,
    UnboundParameterError,
)
from .fermion import (  # noqa: E402
    ExcitationGenerator,
    ExcitationPool,
    Integrals,
    OrbitalSymmetryMap,
    PointGroup,
    build_pool_generalized,
    build_pool_pair_gsd,
    build_pool_sd,
    encode_generator,
    encode_hamiltonian,
    jw_ladder,
    parse_integrals,
    parse_pool,
    screen_orbital,
    screen_spin,
)
from .pauli import (  # noqa: E402
    PauliString,
    PauliSum,
    commutator,
    dress,
    format_pauli_sum,
    multiply,
    parse_pauli_sum,
)
from .sim import (  # noqa: E402
    StateVector,
    apply_circuit,
    circuit_to_unitary,
    equivalent_up_to_phase,
    exact_ground_state,
    expectation,
    transition_amplitude,
)
from .solvers import (  # noqa: E402
    AnsatzSpec,
    QpeOutcome,
    VQEResult,
    adapt_vqe,
    build_ansatz,
    gradient,
    iqcc_step,
    pqe_solve,
    qcc_screen,
    qpe_run,
    vqe_minimize,
)
from .tableau import (  # noqa: E402
    CliffordOp,
    Tableau,
    apply_clifford,
    compile_double,
    compile_generator_tableau,
    compile_singles_block,
    diagonalize,
    factor_parity,
)

__version__ = "0.1.0"
