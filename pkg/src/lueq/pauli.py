"""Dense n-qubit states and the generalized Pauli (Bloch) coefficient basis.

Conventions used throughout the library:

- Qubits are labelled 1..n, qubit 1 being the most significant tensor factor:
  the basis state |b1 b2 ... bn> has flat index sum(b_k * 2**(n-k)).
- A Pauli index is an n-tuple over {0,1,2,3} with 0 = identity, 1,2,3 = x,y,z.
  The matrix it denotes is the Kronecker product factor by factor, qubit 1
  outermost.
- Coefficient vectors are real, length 4**n, row-major in base 4 with qubit 1
  most significant; equivalently an ndarray of shape (4,)*n with axis k-1 for
  qubit k. The state is rho = sum_a r_a * sigma_a with
  r_a = Tr(sigma_a rho) / 2**n, so r at the all-zero index is 1/2**n.

All public objects are immutable values; every function here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArityError, InvalidStateError, QubitIndexError

__all__ = [
    "PAULI",
    "MultiQubitState",
    "PauliCoefficients",
    "pauli_matrix",
    "to_pauli_coefficients",
    "from_pauli_coefficients",
    "bloch_vector",
    "correlation_coefficient",
    "transform_coefficients",
    "EPS_HERMITIAN",
    "EPS_TRACE",
    "EPS_PSD",
]

# Single-qubit basis: identity, x, y, z.
PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
PAULI.flags.writeable = False

# Default validation gates. The paper works in exact arithmetic; doubles need
# explicit tolerances. Relative for hermiticity/trace, absolute on eigenvalues.
EPS_HERMITIAN = 1e-10
EPS_TRACE = 1e-10
EPS_PSD = 1e-9

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _infer_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise ArityError(f"matrix dimension {dim} is not a power of two >= 2")
    return n


@dataclass(frozen=True)
class MultiQubitState:
    """Validated 2**n x 2**n density matrix with its qubit count.

    Construction checks hermiticity, unit trace and positive semidefiniteness
    against the module tolerances (overridable per instance). The stored
    matrix is a read-only copy; instances are safe to share between threads.
    """

    matrix: np.ndarray
    n: int = field(default=0)
    eps_hermitian: float = EPS_HERMITIAN
    eps_trace: float = EPS_TRACE
    eps_psd: float = EPS_PSD

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError("hermitian", f"shape {m.shape} is not square")
        n = _infer_qubits(m.shape[0])
        if self.n and self.n != n:
            raise ArityError(f"declared n={self.n} but matrix is {m.shape[0]}x{m.shape[0]}")
        scale = np.linalg.norm(m) or 1.0
        herm_defect = np.linalg.norm(m - m.conj().T) / scale
        if herm_defect > self.eps_hermitian:
            raise InvalidStateError("hermitian", f"relative defect {herm_defect:.3e}")
        trace_defect = abs(m.trace() - 1.0)
        if trace_defect > self.eps_trace:
            raise InvalidStateError("unit-trace", f"trace {m.trace():.17g}")
        m = (m + m.conj().T) / 2.0
        low = np.linalg.eigvalsh(m).min()
        if low < -self.eps_psd:
            raise InvalidStateError("positive-semidefinite", f"min eigenvalue {low:.3e}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "n", n)

    @classmethod
    def from_vector(cls, amplitudes, **tol) -> "MultiQubitState":
        """Build the pure state |psi><psi| from a normalized amplitude vector."""
        psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-10:
            raise InvalidStateError("normalized", f"amplitude norm {norm:.17g}")
        return cls(np.outer(psi, psi.conj()), **tol)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


@dataclass(frozen=True)
class PauliCoefficients:
    """Real coefficient vector of length 4**n in the generalized Pauli basis."""

    n: int
    values: np.ndarray  # flat, length 4**n

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size != 4**self.n:
            raise ArityError(f"expected 4**{self.n} coefficients, got {v.size}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def tensor(self) -> np.ndarray:
        """View as an ndarray of shape (4,)*n, axis k-1 indexing qubit k."""
        return self.values.reshape((4,) * self.n)

    def __getitem__(self, idx) -> float:
        return float(self.tensor()[tuple(idx)])


def pauli_matrix(idx) -> np.ndarray:
    """Kronecker product of single-qubit Paulis selected by an index tuple."""
    idx = tuple(int(a) for a in idx)
    if len(idx) < 1 or any(a not in (0, 1, 2, 3) for a in idx):
        raise QubitIndexError(f"invalid Pauli index {idx}")
    out = PAULI[idx[0]]
    for a in idx[1:]:
        out = np.kron(out, PAULI[a])
    return out


def to_pauli_coefficients(state: MultiQubitState, eps_hermitian: float = EPS_HERMITIAN) -> PauliCoefficients:
    """Expand a state in the Pauli basis: r_a = Tr(sigma_a rho) / 2**n.

    The traces of a Hermitian matrix against Hermitian basis elements are
    real; any imaginary residue beyond ``eps_hermitian`` (relative) raises,
    otherwise it is discarded.
    """
    n = state.n
    t = _coefficient_tensor(state.matrix, n)
    scale = np.abs(t).max() or 1.0
    residue = np.abs(t.imag).max()
    if residue > eps_hermitian * max(scale, 1.0):
        raise InvalidStateError("hermitian", f"imaginary coefficient residue {residue:.3e}")
    return PauliCoefficients(n, t.real.reshape(-1))


def _coefficient_tensor(matrix: np.ndarray, n: int) -> np.ndarray:
    # T[a1..an] = sum P[a1,i1,j1]...P[an,in,jn] M[j.., i..] / 2**n  via one einsum
    m = matrix.reshape((2,) * (2 * n))
    row = _LETTERS[:n]                      # j indices
    col = _LETTERS[n:2 * n]                 # i indices
    out = _LETTERS[2 * n:3 * n]             # Pauli axes
    subs = ",".join(f"{out[k]}{col[k]}{row[k]}" for k in range(n))
    subs += f",{row}{col}->{out}"
    return np.einsum(subs, *([PAULI] * n), m, optimize=True) / 2**n


def from_pauli_coefficients(coeffs: PauliCoefficients, eps_psd: float = EPS_PSD) -> MultiQubitState:
    """Rebuild the density matrix sum_a r_a sigma_a and validate it.

    The coefficient vector must carry r = 1/2**n at the all-identity index;
    positivity is not implied by the expansion and is checked, raising
    ``InvalidStateError("positive-semidefinite")`` when violated.
    """
    n = coeffs.n
    if abs(coeffs.values[0] - 0.5**n) > EPS_TRACE:
        raise InvalidStateError("unit-trace", f"identity coefficient {coeffs.values[0]:.17g}")
    t = coeffs.tensor()
    row = _LETTERS[:n]
    col = _LETTERS[n:2 * n]
    ax = _LETTERS[2 * n:3 * n]
    subs = ",".join(f"{ax[k]}{row[k]}{col[k]}" for k in range(n))
    subs += f",{ax}->{row}{col}"
    m = np.einsum(subs, *([PAULI] * n), t, optimize=True).reshape(2**n, 2**n)
    return MultiQubitState(m, eps_psd=eps_psd)


def bloch_vector(state: MultiQubitState) -> np.ndarray:
    """3-vector r with rho = (1 + r.sigma)/2 for a single qubit."""
    if state.n != 1:
        raise ArityError(f"bloch_vector needs n=1, got n={state.n}")
    m = state.matrix
    return np.array([np.trace(PAULI[k] @ m).real for k in (1, 2, 3)])


def correlation_coefficient(coeffs: PauliCoefficients, placements: dict) -> float:
    """Coefficient with the given Pauli axes at the given qubits, 0 elsewhere.

    ``placements`` maps 1-based qubit labels to axes in {1,2,3}; the empty
    map selects the identity component 1/2**n.
    """
    idx = [0] * coeffs.n
    for qubit, axis in placements.items():
        if not 1 <= qubit <= coeffs.n:
            raise QubitIndexError(f"qubit {qubit} outside 1..{coeffs.n}")
        if axis not in (1, 2, 3):
            raise QubitIndexError(f"axis {axis} not in 1..3")
        idx[qubit - 1] = axis
    return coeffs[idx]


def transform_coefficients(coeffs: PauliCoefficients, rotations: dict) -> PauliCoefficients:
    """Apply per-qubit Bloch rotations to a coefficient tensor.

    ``rotations`` maps 1-based qubit labels to 3x3 rotation matrices. This is
    the coefficient-space image of conjugating by the corresponding local
    unitaries: the axis-{1,2,3} components of each listed qubit transform by
    its matrix, identity components are untouched.
    """
    t = coeffs.tensor().copy()
    for qubit, rot in rotations.items():
        if not 1 <= qubit <= coeffs.n:
            raise QubitIndexError(f"qubit {qubit} outside 1..{coeffs.n}")
        block = np.eye(4)
        block[1:, 1:] = rot
        t = np.moveaxis(np.tensordot(block, t, axes=(1, qubit - 1)), 0, qubit - 1)
    return PauliCoefficients(coeffs.n, t.reshape(-1))
