"""Partial trace onto arbitrary qubit subsets.

The primary implementation works on the Pauli coefficient vector, where
tracing out a qubit is a projection: keep the components whose index is 0 on
every traced qubit and rescale by 2 per traced qubit. A dense reshape-and-
trace path is kept for cross-checking.

Output qubits are relabelled 1..k in the order of the (strictly increasing)
keep set; callers that need the origin labels keep the tuple they passed in.
"""

from __future__ import annotations

import numpy as np

from .errors import QubitIndexError
from .pauli import (
    MultiQubitState,
    PauliCoefficients,
    from_pauli_coefficients,
    to_pauli_coefficients,
)

__all__ = ["partial_trace", "partial_trace_dense", "reduce_coefficients"]


def _check_keep(keep, n: int) -> tuple:
    keep = tuple(int(q) for q in keep)
    if not keep:
        raise QubitIndexError("keep set is empty")
    if any(not 1 <= q <= n for q in keep):
        raise QubitIndexError(f"keep set {keep} outside 1..{n}")
    if any(b <= a for a, b in zip(keep, keep[1:])):
        raise QubitIndexError(f"keep set {keep} must be strictly increasing")
    return keep


def reduce_coefficients(coeffs: PauliCoefficients, keep) -> PauliCoefficients:
    """Coefficient vector of the reduced state on the kept qubits.

    r_reduced[b] = 2**(n-k) * r[b on kept qubits, 0 elsewhere].
    """
    keep = _check_keep(keep, coeffs.n)
    t = coeffs.tensor()
    idx = tuple(slice(None) if q in keep else 0 for q in range(1, coeffs.n + 1))
    sub = t[idx] * 2 ** (coeffs.n - len(keep))
    return PauliCoefficients(len(keep), sub.reshape(-1))


def partial_trace(state: MultiQubitState, keep) -> MultiQubitState:
    """Reduced density matrix of the qubits in ``keep`` (1-based, increasing)."""
    if len(_check_keep(keep, state.n)) == state.n:
        return state
    reduced = reduce_coefficients(to_pauli_coefficients(state), keep)
    return from_pauli_coefficients(reduced)


def partial_trace_dense(state: MultiQubitState, keep) -> MultiQubitState:
    """Same contract as ``partial_trace`` via dense index contraction."""
    keep = _check_keep(keep, state.n)
    n = state.n
    t = state.matrix.reshape((2,) * (2 * n))
    # Contract row/col axes of each traced qubit, innermost first so the
    # remaining axis numbers stay valid.
    for q in sorted(set(range(1, n + 1)) - set(keep), reverse=True):
        k = t.ndim // 2
        t = np.trace(t, axis1=q - 1, axis2=q - 1 + k)
    d = 2 ** len(keep)
    return MultiQubitState(t.reshape(d, d))
