"""Decide local-unitary equivalence of n-qubit density matrices.

The library answers whether two n-qubit states (pure or mixed) are related by
a tensor product of per-qubit unitaries and, when they are, returns explicit
connecting unitaries. See ``decide_lu_equivalence`` for the entry point and
the ``lueq`` command-line tool for file-based use.
"""

from . import errors
from .angle_solver import (
    CorrelationBlock,
    ResidualUnitary,
    correlation_block,
    escalate_order,
    phase_pair_candidates,
    solve_phase,
    solve_phase_pair,
    solve_rotation,
    solve_rotation_pair,
)
from .oracle import brute_force_lu_search, random_local_unitary, random_state
from .pauli import (
    MultiQubitState,
    PauliCoefficients,
    bloch_vector,
    correlation_coefficient,
    from_pauli_coefficients,
    pauli_matrix,
    to_pauli_coefficients,
    transform_coefficients,
)
from .protocol import (
    DecisionConfig,
    PipelineTrace,
    SolverEvidence,
    SpectrumMismatch,
    Verdict,
    VerificationFailure,
    apply_local_unitary,
    decide_lu_equivalence,
    spectrum_gate,
    verify_equivalence,
)
from .reduction import partial_trace, partial_trace_dense, reduce_coefficients
from .reference_form import qubit_diagonalizers, reference_form
from .spectral import (
    Diagonalization,
    RotationParams,
    bloch_rotation,
    cyclic_operator,
    diagonalize_qubit,
    is_maximally_mixed,
    params_from_rotation,
    phase_unitary,
    rotation_about,
    su2_from_params,
)

__all__ = [
    "errors",
    "MultiQubitState",
    "PauliCoefficients",
    "pauli_matrix",
    "to_pauli_coefficients",
    "from_pauli_coefficients",
    "bloch_vector",
    "correlation_coefficient",
    "transform_coefficients",
    "partial_trace",
    "partial_trace_dense",
    "reduce_coefficients",
    "Diagonalization",
    "RotationParams",
    "diagonalize_qubit",
    "is_maximally_mixed",
    "cyclic_operator",
    "su2_from_params",
    "phase_unitary",
    "bloch_rotation",
    "params_from_rotation",
    "rotation_about",
    "reference_form",
    "qubit_diagonalizers",
    "ResidualUnitary",
    "CorrelationBlock",
    "correlation_block",
    "solve_phase",
    "solve_phase_pair",
    "phase_pair_candidates",
    "solve_rotation",
    "solve_rotation_pair",
    "escalate_order",
    "DecisionConfig",
    "Verdict",
    "PipelineTrace",
    "SpectrumMismatch",
    "VerificationFailure",
    "SolverEvidence",
    "spectrum_gate",
    "decide_lu_equivalence",
    "verify_equivalence",
    "apply_local_unitary",
    "brute_force_lu_search",
    "random_state",
    "random_local_unitary",
]

__version__ = "0.1.0"
