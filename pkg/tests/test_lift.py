import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_directions, brute_max, brute_width
from spectrasketch.errors import EnumerationTooLarge, InconsistentInputs, Infeasible
from spectrasketch.lift import (
    DirectionSet,
    build_lift,
    build_slack_matrix,
    certify_exactness,
    enumerate_directions,
    maximize_over_lift,
)
from spectrasketch.psdrank import PsdFactorization

SQUARE = np.array([[0, 0], [1, 0], [0, 1], [1, 1]])
# k * a_ij for the unit square against (-1,0), (0,-1), (0,0), (0,1), (1,0), hand table
SQUARE_SLACK = [
    [0, 0, 0, 1, 1],
    [1, 0, 0, 1, 0],
    [0, 1, 0, 0, 1],
    [1, 1, 0, 0, 0],
]
CROSS3 = np.vstack([np.zeros((1, 3), dtype=int), np.eye(3, dtype=int), -np.eye(3, dtype=int)])


@pytest.fixture(scope="module")
def square_lift():
    dirs = enumerate_directions(SQUARE, 1, 1)
    return dirs, build_lift(SQUARE, dirs, 1)


def test_square_directions():
    dirs = enumerate_directions(SQUARE, 1, 1)
    assert dirs.v.tolist() == [[-1, 0], [0, -1], [0, 0], [0, 1], [1, 0]]
    assert dirs.m.tolist() == [0, 0, 0, 1, 1]
    assert dirs.width.tolist() == [1, 1, 0, 1, 1]
    assert dirs.lifted.tolist()[2] == [0, 0, 1]


def test_single_point_keeps_everything():
    dirs = enumerate_directions([[0, 0]], 3, 1)
    assert len(dirs) == 9
    assert np.all(dirs.width == 0)


def test_only_zero_survives():
    dirs = enumerate_directions([[0], [3]], 1, 1)
    assert dirs.v.tolist() == [[0]]


def test_enumeration_cap():
    with pytest.raises(EnumerationTooLarge):
        enumerate_directions(np.zeros((1, 8), dtype=int), 1, 2, cap=1000)


def test_rejects_fractional_points():
    with pytest.raises(ValueError):
        enumerate_directions([[0.5, 0.0]], 1, 1)
    with pytest.raises(ValueError, match="k must be positive"):
        enumerate_directions(SQUARE, 0, 1)


def test_slack_table(square_lift):
    dirs, _ = square_lift
    S = build_slack_matrix(SQUARE, dirs, 1)
    assert S.numerators.tolist() == SQUARE_SLACK
    assert np.all((S.numerators == 0).any(axis=0))


def test_slack_segment_column():
    dirs = DirectionSet(1, np.array([[1], [0]]), np.array([1, 0]), np.array([1, 0]))
    S = build_slack_matrix([[0], [1]], dirs, 1)
    assert S.values[:, 0].tolist() == [1.0, 0.0]
    assert S.values[:, 1].tolist() == [0.0, 0.0]


def test_slack_inconsistent():
    dirs = enumerate_directions(SQUARE, 1, 1)
    wrong = dataclasses.replace(dirs, m=dirs.m + 1)
    with pytest.raises(InconsistentInputs):
        build_slack_matrix(SQUARE, wrong, 1)
    with pytest.raises(InconsistentInputs):
        build_slack_matrix(SQUARE, dirs, 2)


def test_segment_lift():
    B = [[0], [1]]
    dirs = enumerate_directions(B, 1, 1)
    lift = build_lift(B, dirs, 1)
    assert lift.r <= 4
    rep = certify_exactness(lift, B, dirs)
    assert rep.identity_residual <= 1e-10
    assert rep.passed


def test_square_lift_containment(square_lift):
    dirs, lift = square_lift
    assert lift.r <= 5
    for u, Ui in zip(SQUARE, lift.U):
        U = PsdFactorization.expand(Ui)
        assert np.max(np.abs(lift.constraint_residuals(u, U))) <= 1e-9
        assert np.linalg.eigvalsh(U)[0] >= -1e-9


def test_single_point_lift():
    # every direction has width 0, so all of them constrain: C = {0}
    B = [[0, 0]]
    dirs = enumerate_directions(B, 2, 1)
    lift = build_lift(B, dirs, 2)
    assert lift.perp_basis.shape == (2, 0)
    assert certify_exactness(lift, B, dirs).passed
    assert maximize_over_lift(lift, [1.0, -2.0]).value == pytest.approx(0.0, abs=1e-9)


def test_zero_direction_only_is_free():
    zero = DirectionSet(1, np.zeros((1, 2), dtype=np.int64), np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64))
    lift = build_lift(SQUARE, zero, 1)
    assert lift.perp_basis.shape == (2, 2)
    assert maximize_over_lift(lift, [1.0, 0.0]).status == "unbounded"


def test_certify_square(square_lift):
    dirs, lift = square_lift
    rep = certify_exactness(lift, SQUARE, dirs)
    assert rep.passed
    for ch in rep.directions:
        assert ch.m == brute_max(SQUARE, ch.v)
        assert int(SQUARE[ch.attained_by] @ ch.v) == ch.m


def test_certify_non_psd_plant(square_lift):
    dirs, lift = square_lift
    V = list(lift.V)
    V[3] = np.diag([1.0] + [-1.0] + [0.0] * (lift.r - 2))
    rep = certify_exactness(dataclasses.replace(lift, V=tuple(V)), SQUARE, dirs)
    assert not rep.directions[3].dual_valid
    assert not rep.passed


def test_certify_identity_plant(square_lift):
    dirs, lift = square_lift
    U = list(lift.U)
    U[1] = PsdFactorization.expand(U[1]) * 1.5
    rep = certify_exactness(dataclasses.replace(lift, U=tuple(U)), SQUARE, dirs)
    assert rep.identity_residual > 1e-8
    assert not rep.passed


def test_certify_mismatched_points(square_lift):
    dirs, lift = square_lift
    assert not certify_exactness(lift, SQUARE + 1, enumerate_directions(SQUARE + 1, 1, 1)).passed


def test_maximize_square(square_lift):
    _, lift = square_lift
    assert maximize_over_lift(lift, [1.0, 0.0]).value == pytest.approx(1.0, abs=1e-6)
    assert maximize_over_lift(lift, [-1.0, 0.0]).value == pytest.approx(0.0, abs=1e-6)
    # (1,1) has width 2 > k, yet the lift is still bounded by the e1 and e2 faces
    assert maximize_over_lift(lift, [1.0, 1.0]).value == pytest.approx(2.0, abs=1e-6)


def test_maximize_free_subspace():
    full = enumerate_directions(SQUARE, 1, 1)
    keep = [0, 2, 4]
    dirs = DirectionSet(1, full.v[keep], full.m[keep], full.width[keep], 1)
    lift = build_lift(SQUARE, dirs, 1)
    assert maximize_over_lift(lift, [0.0, 1.0]).status == "unbounded"
    assert maximize_over_lift(lift, [1.0, 0.0]).value == pytest.approx(1.0, abs=1e-6)


def test_maximize_corrupted_is_infeasible(square_lift):
    dirs, lift = square_lift
    V = list(lift.V)
    V[2] = np.eye(lift.r)
    with pytest.raises(Infeasible):
        maximize_over_lift(dataclasses.replace(lift, V=tuple(V)), [1.0, 0.0])


def test_cross_polytope_z3_exact():
    dirs = enumerate_directions(CROSS3, 2, 1)
    lift = build_lift(CROSS3, dirs, 2)
    assert lift.r <= math.comb(7, 2)
    for v, m in zip(dirs.v[::5], dirs.m[::5]):
        assert maximize_over_lift(lift, v.astype(float)).value == pytest.approx(m, abs=1e-5)


small_sets = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=5, unique=True)


@settings(max_examples=25, deadline=None)
@given(small_sets, st.integers(1, 2))
def test_lift_invariants(pts, k):
    B = np.array(pts)
    dirs = enumerate_directions(B, k, 1)
    assert sorted(map(tuple, dirs.v.tolist())) == sorted(brute_directions(B, k, 1))
    for v, m, w in zip(dirs.v, dirs.m, dirs.width):
        assert m == brute_max(B, v) and w == brute_width(B, v)
    S = build_slack_matrix(B, dirs, k)
    assert S.numerators.dtype.kind == "i"
    assert S.numerators.min() >= 0 and S.numerators.max() <= k
    assert len(np.unique(S.numerators)) <= k + 1
    lift = build_lift(B, dirs, k)
    assert lift.r <= math.comb(2 + k + 2, k)
    rep = certify_exactness(lift, B, dirs)
    assert rep.passed, rep.problems
    for u, Ui in zip(B, lift.U):
        assert np.max(np.abs(lift.constraint_residuals(u, PsdFactorization.expand(Ui)))) <= 1e-9


@settings(max_examples=8, deadline=None)
@given(small_sets.filter(lambda p: len(p) >= 2), st.integers(0, 1000))
def test_maximize_matches_enumeration(pts, seed):
    B = np.array(pts)
    dirs = enumerate_directions(B, 1, 1)
    lift = build_lift(B, dirs, 1)
    j = int(np.random.default_rng(seed).integers(len(dirs)))
    opt = maximize_over_lift(lift, dirs.v[j].astype(float))
    assert opt.status == "optimal"
    assert opt.value == pytest.approx(dirs.m[j], abs=1e-5)
