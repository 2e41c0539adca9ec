import itertools
import math

import numpy as np
import pytest

import lueq
from lueq import (
    PauliCoefficients,
    ResidualUnitary,
    correlation_block,
    correlation_coefficient,
    escalate_order,
    params_from_rotation,
    phase_pair_candidates,
    rotation_about,
    solve_phase,
    solve_phase_pair,
    solve_rotation,
    solve_rotation_pair,
    to_pauli_coefficients,
    transform_coefficients,
    verify_equivalence,
)
from lueq.angle_solver import rotation_pair_candidates
from lueq.errors import (
    AllCoefficientsVanish,
    InconsistentCoefficients,
    NoConsistentSolution,
    NoSolutionFound,
    NormMismatch,
    OrderLimitExceeded,
    VanishingDenominator,
    VanishingSlice,
)

from conftest import (
    MIXED_A_REFERENCE,
    MIXED_B_REFERENCE,
    PURE_A_REFERENCE,
    PURE_B_REFERENCE,
    bell_state,
    coefficient_tensor,
    ghz_state,
)


def block_of(entries_a, entries_b, i=1, j=2, n=2):
    return correlation_block(
        coefficient_tensor(n, entries_a), coefficient_tensor(n, entries_b), i, j
    )


def test_block_entries_match_coefficient_lookups():
    ca = coefficient_tensor(2, MIXED_A_REFERENCE)
    cb = coefficient_tensor(2, MIXED_B_REFERENCE)
    block = correlation_block(ca, cb, 1, 2)
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            assert block.first[a - 1, b - 1] == correlation_coefficient(ca, {1: a, 2: b})
            assert block.second[a - 1, b - 1] == correlation_coefficient(cb, {1: a, 2: b})


def test_solve_phase_mixed_example():
    block = block_of(MIXED_A_REFERENCE, MIXED_B_REFERENCE)
    assert abs(solve_phase(block, 1)) < 1e-12
    assert abs(solve_phase(block, 2) - math.pi / 2) < 1e-12


def test_solve_phase_identical_slices():
    block = block_of(MIXED_A_REFERENCE, MIXED_A_REFERENCE)
    assert solve_phase(block, 1) == 0.0


@pytest.mark.parametrize("angle", [0.3, 1.2, 2.9])
def test_solve_phase_forward_constructed(angle):
    entries = {(1, 3): 0.11, (2, 3): -0.04, (3, 3): 0.06, (3, 0): -0.02, (0, 3): -0.05}
    ca = coefficient_tensor(2, entries)
    cb = transform_coefficients(ca, {1: rotation_about([0, 0, 1], 2 * angle)})
    block = correlation_block(ca, cb, 1, 2)
    assert abs(solve_phase(block, 1) - angle % math.pi) < 1e-12


def test_solve_phase_vanishing_denominator():
    block = block_of(PURE_A_REFERENCE, PURE_B_REFERENCE)
    with pytest.raises(VanishingDenominator):
        solve_phase(block, 1)


def test_solve_phase_inconsistent_norms():
    a = {(1, 3): 0.1, (3, 3): 0.05}
    b = {(1, 3): 0.2, (3, 3): 0.05}
    with pytest.raises(InconsistentCoefficients):
        solve_phase(block_of(a, b), 1)


def test_solve_phase_z_gate():
    a = {(1, 3): 0.1, (3, 3): 0.05}
    b = {(1, 3): 0.1, (3, 3): 0.06}
    with pytest.raises(InconsistentCoefficients):
        solve_phase(block_of(a, b), 1)


def test_phase_pair_pure_example_family():
    block = block_of(PURE_A_REFERENCE, PURE_B_REFERENCE)
    pair = solve_phase_pair(block)
    assert abs(pair[0]) < 1e-12
    assert abs(pair[1] - math.pi / 2) < 1e-9
    for w1, w2 in phase_pair_candidates(block):
        assert abs(math.cos(2 * (w1 + w2)) + 1.0) < 1e-9


def test_phase_pair_identical_blocks():
    block = block_of(PURE_A_REFERENCE, PURE_A_REFERENCE)
    pair = solve_phase_pair(block)
    assert abs(pair[0]) < 1e-12 and abs(pair[1]) < 1e-12


def test_phase_pair_forward_constructed():
    entries = {(1, 1): 0.08, (1, 2): -0.03, (2, 1): 0.02, (2, 2): 0.05, (3, 3): 0.04}
    ca = coefficient_tensor(2, entries)
    cb = transform_coefficients(
        ca,
        {1: rotation_about([0, 0, 1], 2 * 0.4), 2: rotation_about([0, 0, 1], 2 * 1.1)},
    )
    pair = solve_phase_pair(correlation_block(ca, cb, 1, 2))
    assert abs(pair[0] - 0.4) < 1e-8
    assert abs(pair[1] - 1.1) < 1e-8


def test_phase_pair_all_coefficients_vanish():
    a = {(3, 3): 0.05}
    with pytest.raises(AllCoefficientsVanish):
        solve_phase_pair(block_of(a, a))


def test_phase_pair_no_consistent_solution():
    a = {(1, 1): 0.08, (2, 2): 0.08, (3, 3): 0.04}
    b = {(1, 1): 0.08, (2, 2): 0.02, (3, 3): 0.04}  # wrong singular values
    with pytest.raises(NoConsistentSolution):
        solve_phase_pair(block_of(a, b))


def test_solve_rotation_identity_when_slices_equal():
    a = {(1, 3): 0.05, (3, 3): 0.02}
    params = solve_rotation(block_of(a, a), 1)
    assert params.angle == 0.0


def test_solve_rotation_quarter_turn():
    a = {(1, 3): 0.2}
    b = {(2, 3): 0.2}
    params = solve_rotation(block_of(a, b), 1)
    rot = lueq.bloch_rotation(lueq.su2_from_params(params))
    assert np.linalg.norm(rot @ np.array([0.2, 0, 0]) - np.array([0, 0.2, 0])) < 1e-10


@pytest.mark.parametrize("seed", range(6))
def test_solve_rotation_forward_constructed(seed):
    rng = np.random.default_rng(seed)
    slice_a = rng.normal(size=3) * 0.1
    rot_true = rotation_about(rng.normal(size=3), rng.uniform(0, math.pi))
    slice_b = rot_true @ slice_a
    a = {(1, 3): slice_a[0], (2, 3): slice_a[1], (3, 3): slice_a[2]}
    b = {(1, 3): slice_b[0], (2, 3): slice_b[1], (3, 3): slice_b[2]}
    params = solve_rotation(block_of(a, b), 1)
    rot = lueq.bloch_rotation(lueq.su2_from_params(params))
    # only the mapping property is guaranteed (stabilizer freedom remains)
    assert np.linalg.norm(rot @ slice_a - slice_b) < 1e-8


def test_solve_rotation_norm_mismatch():
    a = {(1, 3): 0.2}
    b = {(1, 3): 0.3}
    with pytest.raises(NormMismatch):
        solve_rotation(block_of(a, b), 1)


def test_solve_rotation_vanishing_slice():
    a = {(1, 1): 0.2}
    with pytest.raises(VanishingSlice):
        solve_rotation(block_of(a, a), 1)


def test_rotation_pair_identical_blocks():
    c = {(1, 1): 0.25, (2, 2): -0.25, (3, 3): 0.25}
    pi, pj = solve_rotation_pair(block_of(c, c))
    ri = lueq.bloch_rotation(lueq.su2_from_params(pi))
    rj = lueq.bloch_rotation(lueq.su2_from_params(pj))
    first = np.diag([0.25, -0.25, 0.25])
    assert np.linalg.norm(ri @ first @ rj.T - first) < 1e-9


@pytest.mark.parametrize("seed", range(6))
def test_rotation_pair_forward_constructed_bell(seed):
    bell = bell_state()
    locs = lueq.random_local_unitary(2, seed=seed)
    rotated = lueq.apply_local_unitary(bell, locs)
    ca = to_pauli_coefficients(bell)
    cb = to_pauli_coefficients(rotated)
    block = correlation_block(ca, cb, 1, 2)
    pi, pj = solve_rotation_pair(block)
    ri = lueq.bloch_rotation(lueq.su2_from_params(pi))
    rj = lueq.bloch_rotation(lueq.su2_from_params(pj))
    assert np.linalg.norm(ri @ block.first @ rj.T - block.second) < 1e-9
    residuals = [ResidualUnitary.general(pi), ResidualUnitary.general(pj)]
    assert verify_equivalence(bell, rotated, residuals) < 1e-8


def test_rotation_pair_rejects_singular_value_mismatch():
    a = {(1, 1): 0.2, (2, 2): -0.2, (3, 3): 0.25}
    b = {(1, 1): 0.2, (2, 2): -0.1, (3, 3): 0.25}
    with pytest.raises(NoSolutionFound):
        solve_rotation_pair(block_of(a, b))


def test_rotation_pair_single_axis_flip_is_unreachable():
    # An odd number of sign flips inverts det(C), which proper rotation
    # pairs preserve; an independent grid-and-refine search confirms the
    # nonzero floor before asserting the solver's refusal.
    c = np.diag([6 / 25, -6 / 25, 1 / 4])
    c2 = np.diag([1.0, -1.0, 1.0]) @ c
    cube = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1.0, -1.0), repeat=3):
            r = np.diag(signs) @ np.eye(3)[list(perm)]
            if np.linalg.det(r) > 0:
                cube.append(r)
    floor = np.inf
    for ri in cube:
        for rj in cube:
            # a couple of alternating closest-rotation refinements per start
            for _ in range(3):
                u, _, vt = np.linalg.svd((c.T @ ri.T) @ c2)
                rj = vt.T @ np.diag([1, 1, np.sign(np.linalg.det(vt.T @ u.T)) or 1]) @ u.T
                u, _, vt = np.linalg.svd((c @ rj.T) @ c2.T)
                ri = vt.T @ np.diag([1, 1, np.sign(np.linalg.det(vt.T @ u.T)) or 1]) @ u.T
            floor = min(floor, np.linalg.norm(ri @ c @ rj.T - c2))
    assert floor > 1e-3  # measured: the improper flip stays far away
    a = {(1, 1): c[0, 0], (2, 2): c[1, 1], (3, 3): c[2, 2]}
    b = {(1, 1): c2[0, 0], (2, 2): c2[1, 1], (3, 3): c2[2, 2]}
    with pytest.raises(NoSolutionFound):
        solve_rotation_pair(block_of(a, b))


def test_rotation_pair_all_coefficients_vanish():
    with pytest.raises(AllCoefficientsVanish):
        solve_rotation_pair(block_of({}, {}))


def test_escalate_solves_third_ghz_qubit():
    ghz = ghz_state()
    angles = [0.7, 1.9, 0.4]
    rots = {q + 1: rotation_about([0, 0, 1], 2 * w) for q, w in enumerate(angles)}
    ca = to_pauli_coefficients(ghz)
    cb = transform_coefficients(ca, rots)
    classes = {1: "strong", 2: "strong", 3: "strong"}
    solved = {
        q: ResidualUnitary.general(params_from_rotation(rots[q])) for q in (1, 2)
    }
    out = escalate_order(ca, cb, solved, classes)
    assert set(out) == {1, 2, 3}
    rot3 = out[3].rotation()
    assert np.linalg.norm(rot3 - rots[3]) < 1e-9


def test_escalate_solves_weak_qubit_from_order_three():
    entries = {
        (3, 0, 0): 0.05, (0, 3, 0): 0.05, (0, 0, 3): 0.05,
        (1, 3, 3): 0.03, (2, 3, 3): 0.01,
    }
    ca = coefficient_tensor(3, entries)
    angle = 1.0
    cb = transform_coefficients(ca, {1: rotation_about([0, 0, 1], 2 * angle)})
    classes = {1: "weak", 2: "weak", 3: "weak"}
    out = escalate_order(ca, cb, {}, classes)
    assert abs(out[1].angle - angle) < 1e-10
    assert out[2].angle == 0.0 and out[3].angle == 0.0


def test_escalate_is_noop_when_solved():
    ca = coefficient_tensor(2, PURE_A_REFERENCE)
    solved = {1: ResidualUnitary.phase(0.1), 2: ResidualUnitary.phase(0.2)}
    out = escalate_order(ca, ca, solved, {1: "weak", 2: "weak"})
    assert out == solved


def test_escalate_order_limit():
    t = np.zeros((4,) * 4)
    t[(0,) * 4] = 1 / 16
    t[(3, 3, 3, 3)] = 0.02
    ca = PauliCoefficients(4, t.reshape(-1))
    classes = {q: "strong" for q in range(1, 5)}
    with pytest.raises(OrderLimitExceeded):
        escalate_order(ca, ca, {}, classes)


def test_solvers_are_deterministic():
    block = block_of(PURE_A_REFERENCE, PURE_B_REFERENCE)
    assert solve_phase_pair(block) == solve_phase_pair(block)
    bell = bell_state()
    rotated = lueq.apply_local_unitary(bell, lueq.random_local_unitary(2, seed=33))
    blk = correlation_block(to_pauli_coefficients(bell), to_pauli_coefficients(rotated), 1, 2)
    first = rotation_pair_candidates(blk)
    second = rotation_pair_candidates(blk)
    assert all(np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]) for a, b in zip(first, second))
