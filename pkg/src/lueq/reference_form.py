"""Reference forms: conjugation by the inverses of per-qubit diagonalizers.

The reference form of a state is (V_1 x ... x V_n)^dag rho (V_1 x ... x V_n)
with V_i the diagonalizer of the i-th one-qubit reduction, so every 1-qubit
marginal of the result is diagonal with ascending populations. Maximally
mixed qubits get the identity.
"""

from __future__ import annotations

import numpy as np

from .errors import ArityError, NonUnitaryInput
from .pauli import MultiQubitState
from .reduction import partial_trace
from .spectral import EPS_DEGENERATE, diagonalize_qubit, is_maximally_mixed

__all__ = ["reference_form", "qubit_diagonalizers"]

_EPS_UNITARY = 1e-10


def qubit_diagonalizers(state: MultiQubitState, eps_degenerate: float = EPS_DEGENERATE) -> list:
    """Per-qubit diagonalizers of all 1-qubit reductions (identity when mixed)."""
    out = []
    for q in range(1, state.n + 1):
        reduced = partial_trace(state, (q,))
        if is_maximally_mixed(reduced, eps_degenerate):
            out.append(np.eye(2, dtype=complex))
        else:
            out.append(diagonalize_qubit(reduced, eps_degenerate).unitary)
    return out


def reference_form(state: MultiQubitState, diagonalizers) -> MultiQubitState:
    """Conjugate by the adjoint of the tensor product of the given unitaries."""
    if len(diagonalizers) != state.n:
        raise ArityError(f"{len(diagonalizers)} diagonalizers for n={state.n}")
    full = np.eye(1, dtype=complex)
    for k, v in enumerate(diagonalizers):
        v = np.asarray(v, dtype=complex)
        if v.shape != (2, 2):
            raise NonUnitaryInput(f"diagonalizer {k + 1} has shape {v.shape}")
        if np.linalg.norm(v.conj().T @ v - np.eye(2)) > _EPS_UNITARY:
            raise NonUnitaryInput(f"diagonalizer {k + 1} is not unitary")
        full = np.kron(full, v)
    return MultiQubitState(full.conj().T @ state.matrix @ full)
