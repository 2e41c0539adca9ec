"""Single-qubit spectral analysis and SU(2) <-> SO(3) conversions.

Diagonalization conventions (deterministic so that reproduced unitaries are
bit-stable): eigenvalues ascending; each eigenvector column is phased so its
largest-magnitude entry (first on ties) is real and nonnegative; a degenerate
2x2 unit-trace PSD matrix is the maximally mixed state and gets V = identity.

A generic SU(2) element is parametrized by a rotation angle in [0, pi] and a
unit axis given by polar/azimuth angles:

    U = exp(i * (angle/2) * axis.sigma)
      = cos(angle/2) * 1 + i sin(angle/2) * axis.sigma

Conjugation by U rotates Bloch vectors by -angle about the axis (equivalently
+angle about the negated axis); ``bloch_rotation`` returns that SO(3) image
and ``params_from_rotation`` inverts it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArityError, DegenerateState, ParamOutOfRange
from .pauli import PAULI, MultiQubitState, bloch_vector

__all__ = [
    "EPS_DEGENERATE",
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
]

# Gap |l2 - l1| below which a 1-qubit state counts as maximally mixed. For a
# unit-trace PSD 2x2 matrix degeneracy forces both eigenvalues to 1/2, so the
# degenerate branch is unique.
EPS_DEGENERATE = 1e-9


@dataclass(frozen=True)
class Diagonalization:
    """Ascending eigenvalue pair and the unitary whose columns diagonalize."""

    lambda1: float
    lambda2: float
    unitary: np.ndarray  # 2x2, column j is the eigenvector of lambda_j

    def __post_init__(self):
        u = np.array(self.unitary, dtype=complex)
        u.flags.writeable = False
        object.__setattr__(self, "unitary", u)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([self.lambda1, self.lambda2])

    @property
    def gap(self) -> float:
        return self.lambda2 - self.lambda1


@dataclass(frozen=True)
class RotationParams:
    """SU(2) parameters: rotation angle plus polar/azimuth of the unit axis."""

    angle: float          # in [0, pi]
    azimuth: float        # in [0, 2*pi)
    polar: float          # in [0, pi]

    def __post_init__(self):
        if not 0.0 <= self.angle <= math.pi + 1e-12:
            raise ParamOutOfRange(f"angle {self.angle} outside [0, pi]")
        if not 0.0 <= self.polar <= math.pi + 1e-12:
            raise ParamOutOfRange(f"polar {self.polar} outside [0, pi]")
        if not 0.0 <= self.azimuth < 2 * math.pi + 1e-12:
            raise ParamOutOfRange(f"azimuth {self.azimuth} outside [0, 2*pi)")

    @property
    def axis(self) -> np.ndarray:
        s = math.sin(self.polar)
        return np.array([math.cos(self.azimuth) * s, math.sin(self.azimuth) * s, math.cos(self.polar)])


def _phase_fix(column: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.round(np.abs(column), 14)))
    pivot = column[k]
    if abs(pivot) == 0.0:
        return column
    return column * (abs(pivot) / pivot)


def diagonalize_qubit(state: MultiQubitState, eps_degenerate: float = EPS_DEGENERATE) -> Diagonalization:
    """Closed-form eigendecomposition of a 1-qubit state.

    Trace/determinant formulas are exact for the only matrix size needed and
    keep the result deterministic; see the module docstring for conventions.
    """
    if state.n != 1:
        raise ArityError(f"diagonalize_qubit needs n=1, got n={state.n}")
    m = state.matrix
    a, b, c = m[0, 0].real, m[1, 1].real, m[0, 1]
    mean = (a + b) / 2.0
    disc = math.hypot((a - b) / 2.0, abs(c))
    lam1, lam2 = mean - disc, mean + disc
    if lam2 - lam1 <= eps_degenerate:
        return Diagonalization(lam1, lam2, np.eye(2, dtype=complex))
    if abs(c) <= 1e-15 * max(1.0, abs(a), abs(b)):
        v = np.eye(2, dtype=complex) if a <= b else np.array([[0, 1], [1, 0]], dtype=complex)
        return Diagonalization(lam1, lam2, v)
    # Eigenvector for lam2: the better-conditioned of two closed forms.
    cand1 = np.array([c, lam2 - a])
    cand2 = np.array([lam2 - b, np.conj(c)])
    v2 = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
    v2 = v2 / np.linalg.norm(v2)
    v1 = np.array([-np.conj(v2[1]), np.conj(v2[0])])
    v = np.column_stack([_phase_fix(v1), _phase_fix(v2)])
    return Diagonalization(lam1, lam2, v)


def is_maximally_mixed(state: MultiQubitState, tol: float = EPS_DEGENERATE) -> bool:
    """True iff the 1-qubit state is within ``tol`` of identity/2 (Frobenius)."""
    if state.n != 1:
        raise ArityError(f"is_maximally_mixed needs n=1, got n={state.n}")
    return bool(np.linalg.norm(state.matrix - np.eye(2) / 2) <= tol)


def cyclic_operator(state: MultiQubitState, angle: float, eps_degenerate: float = EPS_DEGENERATE) -> np.ndarray:
    """Unitary commuting with a non-degenerate 1-qubit state.

    cos(angle)*1 + i sin(angle)*(unit Bloch axis . sigma); every unitary
    fixing the state under conjugation has this form.
    """
    r = bloch_vector(state)
    norm = np.linalg.norm(r)
    if norm <= eps_degenerate:
        raise DegenerateState("Bloch vector is null; every SU(2) element is cyclic")
    axis = r / norm
    n_dot_sigma = axis[0] * PAULI[1] + axis[1] * PAULI[2] + axis[2] * PAULI[3]
    return math.cos(angle) * np.eye(2, dtype=complex) + 1j * math.sin(angle) * n_dot_sigma


def su2_from_params(params: RotationParams) -> np.ndarray:
    """Matrix exp(i*(angle/2)*axis.sigma) for the given parameters."""
    axis = params.axis
    half = params.angle / 2.0
    n_dot_sigma = axis[0] * PAULI[1] + axis[1] * PAULI[2] + axis[2] * PAULI[3]
    return math.cos(half) * np.eye(2, dtype=complex) + 1j * math.sin(half) * n_dot_sigma


def phase_unitary(angle: float) -> np.ndarray:
    """diag(e^{-i angle}, e^{i angle}): the residual for a weak qubit."""
    return np.diag([np.exp(-1j * angle), np.exp(1j * angle)])


def bloch_rotation(unitary: np.ndarray) -> np.ndarray:
    """SO(3) matrix R with U (v.sigma) U^dag = (R v).sigma."""
    u = np.asarray(unitary, dtype=complex)
    r = np.empty((3, 3))
    conj = [u @ PAULI[b + 1] @ u.conj().T for b in range(3)]
    for a in range(3):
        for b in range(3):
            r[a, b] = np.trace(PAULI[a + 1] @ conj[b]).real / 2.0
    return r


def rotation_about(axis, angle: float) -> np.ndarray:
    """Right-handed rotation by ``angle`` about a (not necessarily unit) axis."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def params_from_rotation(rot: np.ndarray) -> RotationParams:
    """Parameters whose SU(2) element induces the given Bloch rotation.

    Axis and angle are extracted through the unit quaternion (Shepperd's
    pivoting keeps the extraction accurate at every angle); since the induced
    rotation of exp(i*(angle/2)*axis.sigma) is by -angle about the axis, the
    quaternion axis is negated.
    """
    r = np.asarray(rot, dtype=float)
    t = r[0, 0] + r[1, 1] + r[2, 2]
    pivots = [1.0 + t, 1.0 + 2 * r[0, 0] - t, 1.0 + 2 * r[1, 1] - t, 1.0 + 2 * r[2, 2] - t]
    k = int(np.argmax(pivots))
    p = math.sqrt(max(pivots[k], 0.0)) / 2.0
    if k == 0:
        q = np.array([p, (r[2, 1] - r[1, 2]) / (4 * p), (r[0, 2] - r[2, 0]) / (4 * p),
                      (r[1, 0] - r[0, 1]) / (4 * p)])
    elif k == 1:
        q = np.array([(r[2, 1] - r[1, 2]) / (4 * p), p, (r[0, 1] + r[1, 0]) / (4 * p),
                      (r[0, 2] + r[2, 0]) / (4 * p)])
    elif k == 2:
        q = np.array([(r[0, 2] - r[2, 0]) / (4 * p), (r[0, 1] + r[1, 0]) / (4 * p), p,
                      (r[1, 2] + r[2, 1]) / (4 * p)])
    else:
        q = np.array([(r[1, 0] - r[0, 1]) / (4 * p), (r[0, 2] + r[2, 0]) / (4 * p),
                      (r[1, 2] + r[2, 1]) / (4 * p), p])
    q = q / np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    vec = np.linalg.norm(q[1:])
    if vec < 1e-15:
        return RotationParams(0.0, 0.0, 0.0)
    angle = 2.0 * math.atan2(vec, q[0])
    axis = -q[1:] / vec
    polar = math.acos(np.clip(axis[2], -1.0, 1.0))
    azimuth = math.atan2(axis[1], axis[0]) % (2 * math.pi)
    return RotationParams(min(angle, math.pi), azimuth, polar)
