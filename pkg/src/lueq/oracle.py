"""Independent brute-force checks and seeded random generators.

The search minimizes the Frobenius distance between the second state and a
locally conjugated first state over all 3n rotation angles, with a seeded
multi-start simplex. It is a search, not an exact method: a small residual
certifies equivalence, a large one is evidence only. Everything here is
deterministic for a fixed (budget, seed).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize

from .errors import RankOutOfRange, TooManyQubits
from .pauli import PAULI, MultiQubitState

__all__ = ["brute_force_lu_search", "random_state", "random_local_unitary"]

_MAX_SEARCH_QUBITS = 3


def _su2_from_raw(angles) -> np.ndarray:
    """Unconstrained triple (angle, azimuth, polar) to an SU(2) matrix."""
    c, s = math.cos(angles[0] / 2.0), math.sin(angles[0] / 2.0)
    sp = math.sin(angles[2])
    n1, n2, n3 = math.cos(angles[1]) * sp, math.sin(angles[1]) * sp, math.cos(angles[2])
    return np.array(
        [
            [c + 1j * s * n3, s * (n2 + 1j * n1)],
            [s * (-n2 + 1j * n1), c - 1j * s * n3],
        ]
    )


def _kron_chain(mats) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def _quaternion_to_angles(q: np.ndarray) -> np.ndarray:
    vec = np.linalg.norm(q[1:])
    if vec < 1e-15:
        return np.zeros(3)
    angle = 2.0 * math.atan2(vec, q[0])
    axis = q[1:] / vec
    return np.array([angle, math.atan2(axis[1], axis[0]), math.acos(np.clip(axis[2], -1, 1))])


def brute_force_lu_search(
    state_a: MultiQubitState,
    state_b: MultiQubitState,
    budget: int = 64,
    seed: int = 0,
    stop_below: float = 1e-9,
):
    """Best local conjugation found by seeded multi-start simplex search.

    Returns (unitaries, residual) for the minimum over ``budget`` starts
    (identity first, Haar-seeded after), ties broken by start index. The scan
    stops early once a residual drops below ``stop_below``, where the point
    already certifies equivalence; the rule is fixed, so results stay
    deterministic. Capped at 3 qubits; beyond that the 3n-dimensional search
    is not worth trusting.
    """
    if state_a.n != state_b.n:
        raise TooManyQubits(f"qubit counts differ: {state_a.n} vs {state_b.n}")
    n = state_a.n
    if n > _MAX_SEARCH_QUBITS:
        raise TooManyQubits(f"brute-force search capped at {_MAX_SEARCH_QUBITS} qubits, got {n}")
    rng = np.random.default_rng(seed)
    a, b = state_a.matrix, state_b.matrix

    def objective(x):
        u = _kron_chain([_su2_from_raw(x[3 * k:3 * k + 3]) for k in range(n)])
        return np.linalg.norm(b - u @ a @ u.conj().T)

    starts = [np.zeros(3 * n)]
    for _ in range(max(0, budget - 1)):
        starts.append(
            np.concatenate([_quaternion_to_angles(_random_quaternion(rng)) for _ in range(n)])
        )

    def polish(x0):
        return minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 2000 * n, "maxfev": 2000 * n},
        )

    # Cheap scan over all starts; a promising basin is polished immediately,
    # the overall winner once more at the end.
    best_x, best_res = starts[0], objective(starts[0])
    for x0 in starts:
        sol = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 120 * n, "maxfev": 120 * n},
        )
        if sol.fun < best_res - 1e-15:
            best_res, best_x = float(sol.fun), sol.x.copy()
        if best_res < 1e-5:
            fine = polish(best_x)
            if fine.fun < best_res:
                best_res, best_x = float(fine.fun), fine.x.copy()
            if best_res < stop_below:
                break
    fine = polish(best_x)
    if fine.fun < best_res:
        best_res, best_x = float(fine.fun), fine.x.copy()
    unitaries = [_su2_from_raw(best_x[3 * k:3 * k + 3]) for k in range(n)]
    return unitaries, float(best_res)


def _random_quaternion(rng) -> np.ndarray:
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def random_state(n: int, rank: int, seed: int = 0) -> MultiQubitState:
    """Rank-``rank`` mixture of Haar-random pure states, Dirichlet weights."""
    if not 1 <= rank <= 2**n:
        raise RankOutOfRange(f"rank {rank} outside 1..{2**n}")
    rng = np.random.default_rng(seed)
    dim = 2**n
    m = np.zeros((dim, dim), dtype=complex)
    weights = rng.dirichlet(np.ones(rank))
    for w in weights:
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        m += w * np.outer(psi, psi.conj())
    return MultiQubitState(m)


def random_local_unitary(n: int, seed: int = 0) -> list:
    """n independent Haar-distributed SU(2) factors (uniform unit quaternions)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        q = _random_quaternion(rng)
        u = q[0] * np.eye(2, dtype=complex) + 1j * (
            q[1] * PAULI[1] + q[2] * PAULI[2] + q[3] * PAULI[3]
        )
        out.append(u)
    return out
