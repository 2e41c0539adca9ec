"""Recovery of the residual per-qubit unitaries from reference-form coefficients.

Residuals come in two kinds. A qubit with a non-degenerate marginal ("weak")
gets a diagonal phase diag(e^{-i w}, e^{i w}), which acts on the (x, y)
coefficient plane as a rotation by 2w. A maximally mixed qubit ("strong")
gets a general SU(2) element, acting as a full SO(3) rotation on that qubit's
coefficient axes.

All solvers work on the coefficient tensors of the two reference forms and
are deterministic: fixed grids, fixed tie-breaking. They never have the final
word; the protocol accepts a residual set only after full-state verification.

Derivation notes. Writing the pair of coefficients with axes (1,2) on the
target qubit and 3 on a partner as a 2-vector u, the phase residual sends
u -> R(2w) u with R the counterclockwise plane rotation, so

    cos 2w = <u, u'> / |u|^2,   sin 2w = (u1 u2' - u2 u1') / |u|^2.

When both slices vanish, the {1,2}x{1,2} block C of the pair transforms as
C -> R(2w_i) C R(2w_j)^T, which expanded in the monomials
x = (ci cj, ci sj, si cj, si sj) is the 4x4 linear system solved below (the
matrix printed in the source carries a typo in its (4,4) entry; the entries
here are re-derived from the rotation action and cross-checked against the
worked two-qubit example, whose solution family ci+j = -1 they reproduce).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import least_squares

from .errors import (
    AllCoefficientsVanish,
    InconsistentCoefficients,
    NoConsistentSolution,
    NormMismatch,
    NoSolutionFound,
    OrderLimitExceeded,
    QubitIndexError,
    VanishingDenominator,
    VanishingSlice,
)
from .pauli import PauliCoefficients, transform_coefficients
from .spectral import (
    RotationParams,
    bloch_rotation,
    params_from_rotation,
    phase_unitary,
    rotation_about,
    su2_from_params,
)

__all__ = [
    "EPS_COEFFICIENT",
    "EPS_SOLVE",
    "ResidualUnitary",
    "CorrelationBlock",
    "correlation_block",
    "solve_phase",
    "solve_phase_pair",
    "phase_pair_candidates",
    "solve_rotation",
    "solve_rotation_pair",
    "rotation_pair_candidates",
    "escalate_order",
]

EPS_COEFFICIENT = 1e-9   # a coefficient at or below this is "null"
EPS_SOLVE = 1e-10        # residual target for solver equations

_AXES = (1, 2, 3)


@dataclass(frozen=True)
class ResidualUnitary:
    """Per-qubit residual: a diagonal phase or a general SU(2) element."""

    kind: str  # "phase" | "general"
    angle: float = 0.0
    params: Optional[RotationParams] = None

    @classmethod
    def phase(cls, angle: float) -> "ResidualUnitary":
        return cls("phase", angle=float(angle) % (2 * math.pi))

    @classmethod
    def general(cls, params: RotationParams) -> "ResidualUnitary":
        return cls("general", params=params)

    def matrix(self) -> np.ndarray:
        if self.kind == "phase":
            return phase_unitary(self.angle)
        return su2_from_params(self.params)

    def rotation(self) -> np.ndarray:
        """Induced rotation of this residual on the qubit's Bloch axes."""
        if self.kind == "phase":
            return rotation_about((0.0, 0.0, 1.0), 2.0 * self.angle)
        return bloch_rotation(su2_from_params(self.params))

    def describe(self) -> dict:
        if self.kind == "phase":
            return {"kind": "phase", "angle": self.angle}
        return {
            "kind": "general",
            "angle": self.params.angle,
            "azimuth": self.params.azimuth,
            "polar": self.params.polar,
        }


@dataclass(frozen=True)
class CorrelationBlock:
    """3x3 correlation coefficients of one qubit pair, from both states.

    Entry [a-1, b-1] is the coefficient with axis a on ``qubit_i`` and axis b
    on ``qubit_j`` (identity elsewhere); ``first`` comes from the reference
    form of the first state, ``second`` from the second.
    """

    qubit_i: int
    qubit_j: int
    first: np.ndarray
    second: np.ndarray

    def __post_init__(self):
        for name in ("first", "second"):
            m = np.array(getattr(self, name), dtype=float)
            m.flags.writeable = False
            object.__setattr__(self, name, m)

    def phase_slices(self, target: int):
        """(u, u') pairs of (x,y)-on-target, z-on-partner coefficients."""
        if target == self.qubit_i:
            return self.first[:2, 2].copy(), self.second[:2, 2].copy()
        if target == self.qubit_j:
            return self.first[2, :2].copy(), self.second[2, :2].copy()
        raise QubitIndexError(f"qubit {target} not part of block {self.qubit_i},{self.qubit_j}")

    def column_slices(self, target: int):
        """(v, v') 3-vectors over the target's axes, z on the partner."""
        if target == self.qubit_i:
            return self.first[:, 2].copy(), self.second[:, 2].copy()
        if target == self.qubit_j:
            return self.first[2, :].copy(), self.second[2, :].copy()
        raise QubitIndexError(f"qubit {target} not part of block {self.qubit_i},{self.qubit_j}")


def correlation_block(
    coeffs_a: PauliCoefficients, coeffs_b: PauliCoefficients, qubit_i: int, qubit_j: int
) -> CorrelationBlock:
    """Extract the pair block from both coefficient tensors."""
    n = coeffs_a.n
    if coeffs_b.n != n:
        raise QubitIndexError("coefficient tensors have different qubit counts")
    if not (1 <= qubit_i <= n and 1 <= qubit_j <= n) or qubit_i == qubit_j:
        raise QubitIndexError(f"invalid qubit pair ({qubit_i}, {qubit_j})")
    ta, tb = coeffs_a.tensor(), coeffs_b.tensor()

    def block(t):
        out = np.empty((3, 3))
        idx = [0] * n
        for a in _AXES:
            for b in _AXES:
                idx[qubit_i - 1], idx[qubit_j - 1] = a, b
                out[a - 1, b - 1] = t[tuple(idx)]
        return out

    return CorrelationBlock(qubit_i, qubit_j, block(ta), block(tb))


def _check_z_consistency(block: CorrelationBlock, eps: float):
    if abs(block.first[2, 2] - block.second[2, 2]) > eps:
        raise InconsistentCoefficients(
            f"z-z coefficient differs between states at pair "
            f"({block.qubit_i}, {block.qubit_j}): "
            f"{block.first[2, 2]:.3e} vs {block.second[2, 2]:.3e}"
        )


def solve_phase(block: CorrelationBlock, target: int, eps_coefficient: float = EPS_COEFFICIENT) -> float:
    """Phase angle of a weak qubit from one weak partner's slice pair.

    Returns the angle in [0, pi). Raises ``VanishingDenominator`` when the
    slice is null (caller falls back to the joint linear system) and
    ``InconsistentCoefficients`` when the slices cannot be related by any
    plane rotation (non-equivalence evidence).
    """
    _check_z_consistency(block, eps_coefficient)
    u, u2 = block.phase_slices(target)
    denom = float(u @ u)
    if abs(math.sqrt(u2 @ u2) - math.sqrt(denom)) > eps_coefficient:
        raise InconsistentCoefficients(
            f"slice norms differ at qubit {target}: {math.sqrt(denom):.3e} vs {math.sqrt(u2 @ u2):.3e}"
        )
    if denom <= eps_coefficient**2:
        raise VanishingDenominator(f"slice for qubit {target} is null")
    c = float(u @ u2) / denom
    s = float(u[0] * u2[1] - u[1] * u2[0]) / denom
    return (math.atan2(s, c) / 2.0) % math.pi


def _phase_pair_matrix(block: CorrelationBlock) -> np.ndarray:
    c = block.first[:2, :2]
    return np.array(
        [
            [c[0, 0], -c[0, 1], -c[1, 0], c[1, 1]],
            [c[1, 1], c[1, 0], c[0, 1], c[0, 0]],
            [c[0, 1], c[0, 0], -c[1, 1], -c[1, 0]],
            [c[1, 0], -c[1, 1], c[0, 0], -c[0, 1]],
        ]
    )


def _phase_pair_target(block: CorrelationBlock) -> np.ndarray:
    c = block.second[:2, :2]
    return np.array([c[0, 0], c[1, 1], c[0, 1], c[1, 0]])


def _monomials(a, b):
    ca, sa, cb, sb = np.cos(a), np.sin(a), np.cos(b), np.sin(b)
    return np.stack([ca * cb, ca * sb, sa * cb, sa * sb], axis=-1)


def phase_pair_candidates(
    block: CorrelationBlock,
    eps_coefficient: float = EPS_COEFFICIENT,
    eps_solve: float = EPS_SOLVE,
    grid: int = 240,
) -> list:
    """All distinct angle pairs solving the joint linear system.

    Deterministic: a uniform grid over both doubled angles, local-minimum
    polishing, and a dedicated pass freezing the first angle at the grid
    values so that one-parameter solution families are reported through
    their smallest-first-angle member.
    """
    _check_z_consistency(block, eps_coefficient)
    m = _phase_pair_matrix(block)
    target = _phase_pair_target(block)
    scale = max(np.abs(m).max(), np.abs(target).max())
    if np.abs(block.first[:2, :2]).max() <= eps_coefficient:
        if np.abs(block.second[:2, :2]).max() <= eps_coefficient:
            raise AllCoefficientsVanish(
                f"planar block of pair ({block.qubit_i}, {block.qubit_j}) is null"
            )
        raise NoConsistentSolution("planar block vanishes in one state only")
    tol = eps_solve * max(1.0, scale)

    def residual(x):
        return m @ _monomials(x[0], x[1]) - target

    ticks = np.arange(grid) * (2 * math.pi / grid)
    aa, bb = np.meshgrid(ticks, ticks, indexing="ij")
    res = np.einsum("rk,abk->rab", m, _monomials(aa, bb)) - target[:, None, None]
    cost = np.einsum("rab,rab->ab", res, res)

    found = []

    def polish(a0, b0, freeze_a=False):
        if freeze_a:
            sol = least_squares(lambda y: residual((a0, y[0])), [b0], method="lm")
            a1, b1 = a0, float(sol.x[0])
        else:
            sol = least_squares(residual, [a0, b0], method="lm")
            a1, b1 = float(sol.x[0]), float(sol.x[1])
        if np.linalg.norm(residual((a1, b1))) <= tol:
            pair = ((a1 / 2.0) % math.pi, (b1 / 2.0) % math.pi)
            pair = tuple(0.0 if v < 1e-9 or math.pi - v < 1e-9 else v for v in pair)
            if not any(abs(pair[0] - p[0]) < 1e-7 and abs(pair[1] - p[1]) < 1e-7 for p in found):
                found.append(pair)

    # Freeze-first-angle pass: walks the doubled-angle grid in ascending
    # order, so a solution family is entered at its smallest first angle.
    for ia in range(grid // 2):  # doubled angle in [0, pi) covers all phases
        col = cost[ia]
        for ib in np.argsort(col, kind="stable")[:2]:
            polish(ticks[ia], ticks[ib], freeze_a=True)
        if found:
            break
    # General pass for isolated solutions off the frozen grid.
    flat = np.argsort(cost, axis=None, kind="stable")[:24]
    for k in flat:
        ia, ib = divmod(int(k), grid)
        polish(ticks[ia], ticks[ib])
    if not found:
        raise NoConsistentSolution(
            f"no angle pair reproduces the planar block of ({block.qubit_i}, {block.qubit_j})"
        )
    return sorted(found)


def solve_phase_pair(
    block: CorrelationBlock,
    eps_coefficient: float = EPS_COEFFICIENT,
    eps_solve: float = EPS_SOLVE,
) -> tuple:
    """Canonical (smallest-angles) solution of the joint linear system."""
    return phase_pair_candidates(block, eps_coefficient, eps_solve)[0]


def _map_rotation(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """A rotation sending unit vector v to unit vector w (geodesic choice)."""
    cross = np.cross(v, w)
    dot = float(v @ w)
    norm = np.linalg.norm(cross)
    if norm < 1e-14:
        if dot > 0:
            return np.eye(3)
        # Antiparallel: half turn about a deterministic perpendicular axis.
        k = int(np.argmin(np.abs(v)))
        axis = np.cross(v, np.eye(3)[k])
        return rotation_about(axis, math.pi)
    return rotation_about(cross, math.atan2(norm, dot))


def solve_rotation(
    block: CorrelationBlock, strong: int, eps_coefficient: float = EPS_COEFFICIENT
) -> RotationParams:
    """Rotation parameters for a maximally mixed qubit from a weak partner.

    Uses the 3-vector of coefficients with the strong qubit's axes against
    the partner's z axis; the returned parameters induce the rotation mapping
    that vector onto its counterpart in the second state. The rotation is
    determined only up to the stabilizer of the image vector; the geodesic
    representative is returned and the protocol searches the one-parameter
    family if verification demands it.
    """
    v, w = block.column_slices(strong)
    nv, nw = np.linalg.norm(v), np.linalg.norm(w)
    if abs(nv - nw) > eps_coefficient:
        raise NormMismatch(f"slice norms differ at qubit {strong}: {nv:.3e} vs {nw:.3e}")
    if nv <= eps_coefficient:
        raise VanishingSlice(f"slice for strong qubit {strong} is null")
    return params_from_rotation(_map_rotation(v / nv, w / nw))


def _kabsch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rotation minimizing ||b - R a||_F over SO(3); columns are samples."""
    u, _, vt = np.linalg.svd(a @ b.T)
    d = np.sign(np.linalg.det(vt.T @ u.T)) or 1.0
    return vt.T @ np.diag([1.0, 1.0, d]) @ u.T


def _cube_rotations() -> list:
    """The 24 rotations of the octahedral group, deterministic order."""
    out, seen = [], set()
    for perm in itertools.permutations(range(3)):
        p = np.eye(3)[list(perm)]
        for signs in itertools.product((1.0, -1.0), repeat=3):
            r = np.diag(signs) @ p
            if np.linalg.det(r) > 0:
                key = tuple(np.round(r.reshape(-1), 6))
                if key not in seen:
                    seen.add(key)
                    out.append(r)
    return out


_CUBE_ROTATIONS = _cube_rotations()


def rotation_pair_candidates(
    block: CorrelationBlock,
    eps_coefficient: float = EPS_COEFFICIENT,
    eps_solve: float = EPS_SOLVE,
    max_candidates: int = 8,
) -> list:
    """(R_i, R_j) rotation pairs with R_i C R_j^T = C' for an all-strong pair.

    Closed-form candidates come from matched singular value decompositions
    (the singular values themselves are invariants and act as an early
    consistency gate); a deterministic alternating-Procrustes refinement over
    the 24 cube rotations covers degenerate spectra. Multiple candidates are
    returned because a rank-deficient block pins the pair only up to
    stabilizer factors and simultaneous sign flips.
    """
    c, c2 = block.first, block.second
    scale = max(np.abs(c).max(), np.abs(c2).max())
    if scale <= eps_coefficient:
        raise AllCoefficientsVanish(
            f"correlation block of pair ({block.qubit_i}, {block.qubit_j}) is null"
        )
    tol = max(eps_solve * max(1.0, scale), 1e-13)
    u, s, vt = np.linalg.svd(c)
    u2, s2, v2t = np.linalg.svd(c2)
    if np.abs(s - s2).max() > 10 * eps_coefficient:
        raise NoSolutionFound(
            f"singular values of pair ({block.qubit_i}, {block.qubit_j}) differ: {s} vs {s2}"
        )

    out = []

    def push(ri, rj):
        if np.linalg.norm(ri @ c @ rj.T - c2) <= tol:
            key = tuple(np.round(np.concatenate([ri.reshape(-1), rj.reshape(-1)]), 9))
            if not any(np.allclose(key, k, atol=1e-8) for k, _ in out):
                out.append((key, (ri, rj)))

    for signs in itertools.product((1.0, -1.0), repeat=3):
        d = np.diag(signs)
        ri = u2 @ d @ u.T
        rj = v2t.T @ d @ vt
        if np.linalg.det(ri) > 0 and np.linalg.det(rj) > 0:
            push(ri, rj)
    if len(out) < max_candidates:
        for start in [np.eye(3)] + _CUBE_ROTATIONS:
            ri = start
            rj = _kabsch(c.T @ ri.T, c2.T)
            best = np.inf
            for _ in range(200):
                rj = _kabsch(c.T @ ri.T, c2.T)
                ri = _kabsch(c @ rj.T, c2)
                res = np.linalg.norm(ri @ c @ rj.T - c2)
                if res <= tol or best - res < 1e-16:
                    break
                best = res
            push(ri, rj)
            if len(out) >= max_candidates:
                break
    if not out:
        raise NoSolutionFound(
            f"no rotation pair reproduces the block of ({block.qubit_i}, {block.qubit_j})"
        )
    return [pair for _, pair in out[:max_candidates]]


def solve_rotation_pair(
    block: CorrelationBlock,
    eps_coefficient: float = EPS_COEFFICIENT,
    eps_solve: float = EPS_SOLVE,
) -> tuple:
    """First rotation pair for an all-strong pair, as SU(2) parameters."""
    ri, rj = rotation_pair_candidates(block, eps_coefficient, eps_solve)[0]
    return params_from_rotation(ri), params_from_rotation(rj)


# ---------------------------------------------------------------------------
# Order-3 escalation.

def _order_masks(n: int, cap: int) -> np.ndarray:
    """Boolean tensor marking indices with 1..cap non-identity axes."""
    weights = np.zeros((4,) * n, dtype=int)
    for q in range(n):
        shape = [1] * n
        shape[q] = 4
        weights = weights + (np.arange(4) > 0).astype(int).reshape(shape)
    return (weights >= 1) & (weights <= cap)


def _involvement(tensor: np.ndarray, qubit: int, axes, order_range) -> float:
    """Largest |coefficient| with the qubit's axis in ``axes`` at those orders."""
    n = tensor.ndim
    weights = np.zeros((4,) * n, dtype=int)
    for q in range(n):
        shape = [1] * n
        shape[q] = 4
        weights = weights + (np.arange(4) > 0).astype(int).reshape(shape)
    take = np.take(np.isin(np.arange(4), axes), np.indices(tensor.shape)[qubit - 1])
    lo, hi = order_range
    mask = take & (weights >= lo) & (weights <= hi)
    return float(np.abs(tensor[mask]).max()) if mask.any() else 0.0


def _iter_contexts(n: int, target: int, partner_axes: dict, cap: int):
    """Index templates: free axis on target, chosen axes on a partner subset."""
    partners = sorted(partner_axes)
    for size in range(1, cap):
        for subset in itertools.combinations(partners, size):
            for axes in itertools.product(*(partner_axes[p] for p in subset)):
                idx = [0] * n
                for p, a in zip(subset, axes):
                    idx[p - 1] = a
                yield idx


def _solve_phase_from_tensors(ta, tb, target, partner_axes, cap, eps_coefficient):
    """Accumulated least-squares phase for one weak qubit; None if no data.

    The norm gate compares totals over all contexts, which are invariant
    under any residual stabilizer error on solved partners, so it only fires
    on genuine inconsistency.
    """
    n = ta.ndim
    num_c = num_s = denom = denom_b = 0.0
    for idx in _iter_contexts(n, target, partner_axes, cap):
        i1, i2 = list(idx), list(idx)
        i1[target - 1], i2[target - 1] = 1, 2
        u = np.array([ta[tuple(i1)], ta[tuple(i2)]])
        u2 = np.array([tb[tuple(i1)], tb[tuple(i2)]])
        denom += float(u @ u)
        denom_b += float(u2 @ u2)
        num_c += float(u @ u2)
        num_s += float(u[0] * u2[1] - u[1] * u2[0])
    if denom <= eps_coefficient**2:
        return None
    if abs(math.sqrt(denom) - math.sqrt(denom_b)) > 10 * eps_coefficient:
        raise InconsistentCoefficients(f"slice norms differ at qubit {target} (order <= {cap})")
    return (math.atan2(num_s, num_c) / 2.0) % math.pi


def _solve_rotation_from_tensors(ta, tb, target, partner_axes, cap, eps_coefficient):
    """Stacked-Kabsch rotation for one strong qubit; None if no data.

    Returns (rotation, stacked columns): the caller derives any stabilizer
    family from the column rank.
    """
    n = ta.ndim
    cols_a, cols_b = [], []
    for idx in _iter_contexts(n, target, partner_axes, cap):
        col_a, col_b = np.empty(3), np.empty(3)
        for a in _AXES:
            i = list(idx)
            i[target - 1] = a
            col_a[a - 1] = ta[tuple(i)]
            col_b[a - 1] = tb[tuple(i)]
        cols_a.append(col_a)
        cols_b.append(col_b)
    if not cols_a:
        return None
    a = np.column_stack(cols_a)
    b = np.column_stack(cols_b)
    if np.linalg.norm(a) <= eps_coefficient:
        return None
    if abs(np.linalg.norm(a) - np.linalg.norm(b)) > 10 * eps_coefficient * math.sqrt(a.shape[1]):
        raise NormMismatch(f"stacked slice norms differ at qubit {target}")
    return _kabsch(a, b), a


def _partner_axes_for(target, classes, solved, unsolved_weak_ok=True):
    """Usable context axes per partner while solving ``target``.

    Solved qubits contribute all three axes (their rotation has been applied
    to the tensor); unsolved weak partners contribute only the invariant z.
    """
    axes = {}
    for q, cls in classes.items():
        if q == target:
            continue
        if q in solved:
            axes[q] = _AXES
        elif cls == "weak" and unsolved_weak_ok:
            axes[q] = (3,)
    return axes


def escalate_order(
    coeffs_a: PauliCoefficients,
    coeffs_b: PauliCoefficients,
    residuals: dict,
    classes: dict,
    eps_coefficient: float = EPS_COEFFICIENT,
    order_cap: int = 3,
) -> dict:
    """Solve remaining qubits from correlation tensors up to ``order_cap``.

    ``residuals`` maps already-solved qubit labels to their residuals and is
    returned extended (a no-op when nothing is unsolved). Solved qubits'
    rotations are applied to the first tensor so their axes become usable
    context; progress is iterated to a fixpoint. A qubit whose axes carry no
    weight at any order in either tensor is unconstrained and gets the
    identity. Raises ``OrderLimitExceeded`` if unsolved qubits remain whose
    correlations vanish through ``order_cap`` but not beyond.
    """
    n = coeffs_a.n
    solved = dict(residuals)
    tb = coeffs_b.tensor()
    progress = True
    while progress:
        progress = False
        unsolved = [q for q in sorted(classes) if q not in solved]
        if not unsolved:
            break
        ta = coeffs_a
        rotations = {q: r.rotation() for q, r in solved.items()}
        if rotations:
            ta = transform_coefficients(coeffs_a, rotations)
        ta_t = ta.tensor()
        for q in unsolved:
            axes = (1, 2) if classes[q] == "weak" else (1, 2, 3)
            inv_a = _involvement(ta_t, q, axes, (1, n))
            inv_b = _involvement(tb, q, axes, (1, n))
            if inv_a <= eps_coefficient and inv_b <= eps_coefficient:
                solved[q] = (
                    ResidualUnitary.phase(0.0)
                    if classes[q] == "weak"
                    else ResidualUnitary.general(RotationParams(0.0, 0.0, 0.0))
                )
                progress = True
                continue
            if (inv_a <= eps_coefficient) != (inv_b <= eps_coefficient):
                raise InconsistentCoefficients(
                    f"qubit {q} carries weight in exactly one of the two states"
                )
            partner_axes = _partner_axes_for(q, classes, solved)
            if classes[q] == "weak":
                angle = _solve_phase_from_tensors(ta_t, tb, q, partner_axes, order_cap, eps_coefficient)
                if angle is not None:
                    solved[q] = ResidualUnitary.phase(angle)
                    progress = True
            else:
                got = _solve_rotation_from_tensors(ta_t, tb, q, partner_axes, order_cap, eps_coefficient)
                if got is not None:
                    solved[q] = ResidualUnitary.general(params_from_rotation(got[0]))
                    progress = True
    unsolved = [q for q in sorted(classes) if q not in solved]
    if unsolved:
        raise OrderLimitExceeded(
            f"qubits {unsolved} have correlations only beyond order {order_cap}"
        )
    return solved
