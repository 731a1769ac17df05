import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import moment_gap, sphere_points
from spectrasketch import kernels
from spectrasketch.errors import DegenerateSpan, IterationLimit, ResidualTooLarge
from spectrasketch.mvee import (
    CenteredEllipsoid,
    JohnDecomposition,
    MveeResult,
    extract_john_decomposition,
    mvee_centered,
    optimality_gap,
    verify_john,
)

SQUARE = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])


def test_cross_polytope_gives_unit_disc(backend):
    E, u = mvee_centered(SQUARE)
    np.testing.assert_allclose(E.M, np.eye(2), atol=1e-6)
    np.testing.assert_allclose(E.norms(SQUARE), 1.0, atol=1e-6)


def test_scaled_axes(backend):
    P = np.array([[2.0, 0.0], [-2.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    E, _ = mvee_centered(P)
    np.testing.assert_allclose(E.M, np.diag([0.25, 1.0]), atol=1e-6)


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_sphere_points(backend, d):
    P = sphere_points(200, d, seed=d)
    E, u = mvee_centered(P, gap_tol=1e-7)
    w = np.linalg.eigvalsh(E.M)
    assert np.all(np.abs(w - 1.0) <= 1e-2)
    # independent duality-gap oracle
    assert moment_gap(P, u) <= d * 1e-6
    assert E.contains(P, slack=1e-6)
    assert u.min() >= 0 and u.sum() == pytest.approx(1.0, abs=1e-12)


def test_backends_agree_on_weights():
    P = sphere_points(80, 3, seed=7)
    res = []
    for name in kernels.available_backends():
        prev = kernels.use_backend(name)
        res.append(mvee_centered(P, gap_tol=1e-9)[0].M)
        kernels.use_backend(prev)
    for M in res[1:]:
        np.testing.assert_allclose(M, res[0], atol=1e-7)


def test_away_steps_zero_interior_points(backend):
    P = np.vstack([SQUARE, 0.1 * SQUARE, [[0.3, 0.2]]])
    _, u = mvee_centered(P)
    # interior points end with weight exactly zero
    assert np.all(u[4:] == 0.0)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10_000))
def test_rotation_invariance(d, seed):
    r = np.random.default_rng(seed)
    P = r.standard_normal((3 * d, d))
    Q, _ = np.linalg.qr(r.standard_normal((d, d)))
    E1, _ = mvee_centered(P, gap_tol=1e-12)
    E2, _ = mvee_centered(P @ Q.T, gap_tol=1e-12)
    scale = np.abs(E1.M).max()
    np.testing.assert_allclose(Q @ E1.M @ Q.T, E2.M, atol=1e-8 * max(1.0, scale))


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10_000))
def test_certificate_invariants(d, seed):
    r = np.random.default_rng(seed)
    P = r.standard_normal((4 * d, d))
    tol = 1e-7
    E, u = mvee_centered(P, gap_tol=tol)
    assert np.max(E.norms(P)) <= 1 + tol + 1e-12
    assert optimality_gap(P, u) <= d * tol + 1e-12
    john = extract_john_decomposition(E, P, u, contact_tol=tol)
    assert john.residual <= 10 * d * tol
    assert verify_john(john, P, tol=tol).passed


def test_degenerate_span():
    with pytest.raises(DegenerateSpan):
        mvee_centered(np.array([[1.0, 0.0], [2.0, 0.0]]))


def test_iteration_limit_carries_best_iterate():
    P = sphere_points(100, 4, seed=1)
    with pytest.raises(IterationLimit) as exc:
        mvee_centered(P, gap_tol=1e-14, max_iter=5)
    best = exc.value.payload
    assert isinstance(best, MveeResult)
    assert best.iterations >= 5
    assert np.all(np.isfinite(best.ellipsoid.M))


def test_john_on_square():
    E = CenteredEllipsoid(np.eye(2))
    john = extract_john_decomposition(E, SQUARE, np.full(4, 0.25))
    np.testing.assert_array_equal(john.indices, [0, 1, 2, 3])
    np.testing.assert_allclose(john.weights, 0.25)
    assert john.residual == 0.0


def test_john_frame_invariance():
    P = np.array([[2.0, 0.0], [-2.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    E, u = mvee_centered(P)
    john = extract_john_decomposition(E, P, u)
    Y = P[john.indices] @ john.frame
    np.testing.assert_allclose(np.abs(Y), np.abs(SQUARE[john.indices]), atol=1e-6)
    np.testing.assert_allclose(john.weights, 0.25, atol=1e-6)


def test_verify_john_exact():
    rep = verify_john(JohnDecomposition(np.arange(4), np.full(4, 0.25), np.eye(2)), SQUARE, tol=1e-12)
    assert rep.sum_error == 0 and rep.frobenius_error == 0 and rep.max_contact_slack == 0
    assert rep.passed


def test_verify_john_half_weights():
    dec = JohnDecomposition(np.arange(4), np.array([0.5, 0.5, 0.0, 0.0]), np.eye(2))
    rep = verify_john(dec, SQUARE, tol=1e-6)
    assert rep.frobenius_error == pytest.approx(0.7071067811865476, abs=1e-15)
    assert not rep.passed


def test_verify_john_sum_error_exact():
    dec = JohnDecomposition(np.arange(4), np.array([0.25 + 1e-3, 0.25, 0.25, 0.25]), np.eye(2))
    assert verify_john(dec, SQUARE).sum_error == pytest.approx(1e-3, abs=1e-15)


def test_verify_john_rejects_indefinite_frame():
    dec = JohnDecomposition(np.arange(4), np.full(4, 0.25), np.diag([1.0, -1.0]))
    rep = verify_john(dec, SQUARE, tol=1e-6)
    assert rep.frame_min_eigenvalue == -1.0
    assert not rep.passed


def test_residual_too_large():
    E = CenteredEllipsoid(np.eye(2))
    with pytest.raises(ResidualTooLarge):
        extract_john_decomposition(E, SQUARE, np.array([0.5, 0.5, 0.0, 0.0]))
