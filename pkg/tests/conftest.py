"""Shared builders and the worked-example constants used across the tests.

The two worked examples (one pure, one mixed pair of 2-qubit states) are
entered here as exact fractions in the Pauli coefficient basis; every test
that needs them builds the density matrices through the public API.
"""

import math

import numpy as np
import pytest

from lueq import MultiQubitState, PauliCoefficients, from_pauli_coefficients

SQRT5 = math.sqrt(5.0)


def state_from_coefficients(n, entries) -> MultiQubitState:
    """Build a state from {pauli index tuple: coefficient}; r_0 is implied."""
    t = np.zeros((4,) * n)
    t[(0,) * n] = 0.5**n
    for idx, val in entries.items():
        t[idx] = val
    return from_pauli_coefficients(PauliCoefficients(n, t.reshape(-1)))


def coefficient_tensor(n, entries) -> PauliCoefficients:
    t = np.zeros((4,) * n)
    t[(0,) * n] = 0.5**n
    for idx, val in entries.items():
        t[idx] = val
    return PauliCoefficients(n, t.reshape(-1))


# Pure pair: |psi> = (3/5)|00> + (4/5)|11>, |psi'> with Hadamard-rotated locals.
PURE_A_AMPLITUDES = np.array([3 / 5, 0.0, 0.0, 4 / 5])
PURE_B_AMPLITUDES = np.array([1 / 10, -7 / 10, -7 / 10, 1 / 10])

PURE_A_COEFFS = {
    (0, 3): -7 / 100, (3, 0): -7 / 100,
    (1, 1): 6 / 25, (2, 2): -6 / 25,
    (3, 3): 1 / 4,
}
PURE_B_COEFFS = {
    (0, 1): -7 / 100, (1, 0): -7 / 100,
    (2, 2): 6 / 25, (3, 3): -6 / 25,
    (1, 1): 1 / 4,
}
# Reference forms of the pure pair.
PURE_A_REFERENCE = PURE_A_COEFFS
PURE_B_REFERENCE = {
    (0, 3): -7 / 100, (3, 0): -7 / 100,
    (1, 1): -6 / 25, (2, 2): 6 / 25,
    (3, 3): 1 / 4,
}
# Diagonalizer of both marginals of the second pure state, as printed.
PURE_B_DIAGONALIZER = np.array([[1, -1], [1, 1]]) / math.sqrt(2)

# Mixed pair.
MIXED_A_COEFFS = {
    (0, 1): -7 / 150, (1, 0): -7 / 150,
    (0, 3): -7 / 300, (3, 0): -7 / 300,
    (1, 1): 49 / 3750, (3, 3): 49 / 7500,
}
MIXED_B_COEFFS = {
    (0, 1): -7 / 300, (3, 0): -7 / 300,
    (0, 3): -7 / 150, (1, 0): -7 / 150,
    (3, 1): 49 / 7500, (1, 3): 49 / 3750,
}
MIXED_A_REFERENCE = {
    (0, 3): -7 * SQRT5 / 300, (3, 0): -7 * SQRT5 / 300,
    (1, 1): 49 / 6250,
    (1, 3): 49 / 18750, (3, 1): 49 / 18750,
    (3, 3): 147 / 12500,
}
MIXED_B_REFERENCE = {
    (0, 3): -7 * SQRT5 / 300, (3, 0): -7 * SQRT5 / 300,
    (1, 1): -49 / 6250,
    (1, 3): 49 / 18750, (3, 1): -49 / 18750,
    (3, 3): 147 / 12500,
}
# Marginal spectra of the mixed pair.
MIXED_EIGENVALUES = (0.5 - 7 * SQRT5 / 150, 0.5 + 7 * SQRT5 / 150)

# Shared diagonalizer of the first mixed state's marginals (and of the
# second state's first qubit), as printed.
MIXED_DIAGONALIZER_A = np.array(
    [
        [(1 + SQRT5) / math.sqrt(10 + 2 * SQRT5), (1 - SQRT5) / math.sqrt(10 - 2 * SQRT5)],
        [math.sqrt(2) / math.sqrt(5 + SQRT5), math.sqrt(2) / math.sqrt(5 - SQRT5)],
    ]
)
# Diagonalizer of the second mixed state's second marginal, as printed.
MIXED_DIAGONALIZER_B2 = np.array(
    [
        [(2 + SQRT5) / math.sqrt(10 + 4 * SQRT5), (2 - SQRT5) / math.sqrt(10 - 4 * SQRT5)],
        [1 / math.sqrt(10 + 4 * SQRT5), 1 / math.sqrt(10 - 4 * SQRT5)],
    ]
)


@pytest.fixture
def pure_pair():
    return (
        MultiQubitState.from_vector(PURE_A_AMPLITUDES),
        MultiQubitState.from_vector(PURE_B_AMPLITUDES),
    )


@pytest.fixture
def mixed_pair():
    return (
        state_from_coefficients(2, MIXED_A_COEFFS),
        state_from_coefficients(2, MIXED_B_COEFFS),
    )


def bell_state() -> MultiQubitState:
    return MultiQubitState.from_vector(np.array([1, 0, 0, 1]) / math.sqrt(2))


def ghz_state() -> MultiQubitState:
    amps = np.zeros(8)
    amps[0] = amps[7] = 1 / math.sqrt(2)
    return MultiQubitState.from_vector(amps)


def columns_match_up_to_phase(u, v, tol=1e-12) -> bool:
    """True when each column of u equals the matching column of v up to a phase."""
    u, v = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    for k in range(u.shape[1]):
        overlap = np.vdot(v[:, k], u[:, k])
        if abs(abs(overlap) - 1.0) > tol:
            return False
        if np.linalg.norm(u[:, k] - (overlap / abs(overlap)) * v[:, k]) > tol:
            return False
    return True


def equal_up_to_global_phase(u, v, tol=1e-12) -> bool:
    u, v = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    k = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(v[k]) < tol or abs(u[k]) < tol:
        return False
    phase = u[k] / v[k]
    return abs(abs(phase) - 1.0) <= tol and np.linalg.norm(u - phase * v) <= tol
