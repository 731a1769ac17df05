import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectrasketch.errors import DegreeCapExceeded, EntryOutOfRange, NegativeEntry
from spectrasketch.psdrank import (
    Polynomial,
    PsdFactorization,
    RankFactorization,
    apply_poly_to_factorization,
    approx_low_psd_rank,
    distinct_values,
    lagrange_interpolate,
    psd_factorize_few_values,
    rank_factorize,
    sqrt_grid,
    sqrt_uniform_approx,
    square_factorization,
    verify_psd_factorization,
)

# coefficients of the interpolant through (0,0), (1/2, sqrt(1/2)), (1,1), from sympy
HALF_INTERPOLANT = [0.0, 1.82842712474619, -0.8284271247461901]


def rank_matrix(m, n, rank, seed):
    r = np.random.default_rng(seed)
    A = r.random((m, rank)) @ r.random((rank, n))
    return A / A.max()


def test_interpolate_linear():
    p = lagrange_interpolate([0.0, 1.0], [0.0, 1.0])
    np.testing.assert_allclose(p.coefficients, [0.0, 1.0], atol=1e-15)


def test_interpolate_half_node():
    p = lagrange_interpolate([0.0, 0.5, 1.0], np.sqrt([0.0, 0.5, 1.0]))
    np.testing.assert_allclose(p.coefficients, HALF_INTERPOLANT, atol=1e-12)
    assert p(0.5) == pytest.approx(0.7071067811865476, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 1000))
def test_interpolation_reproduces_nodes(k, seed):
    nodes = np.arange(k + 1) / k
    vals = np.random.default_rng(seed).standard_normal(k + 1)
    p = lagrange_interpolate(nodes, vals)
    np.testing.assert_allclose(p(nodes), vals, atol=1e-9 * (1 + np.abs(vals).max()))


def test_horner_matches_numpy():
    c = np.random.default_rng(0).standard_normal(9)
    t = np.linspace(-1, 1, 101)
    np.testing.assert_allclose(Polynomial(c)(t), np.polynomial.polynomial.polyval(t, c), rtol=1e-13, atol=1e-13)


def test_polynomial_trims_zeros():
    assert Polynomial([1.0, 2.0, 0.0, 0.0]).degree == 1


def _grid_oracle(p):
    t = np.linspace(0.0, 1.0, 200_001)
    return float(np.max(np.abs(np.sqrt(t) - np.polynomial.polynomial.polyval(t, p.coefficients))))


def test_sqrt_approx_degree_one():
    p, err = sqrt_uniform_approx(0.9)
    assert p.degree == 1
    assert err <= 0.3
    assert _grid_oracle(p) <= 0.3


def test_sqrt_approx_eps_03():
    p, err = sqrt_uniform_approx(0.3)
    assert err <= 0.1
    # an independent, finer grid agrees to well within the slack
    assert _grid_oracle(p) <= 0.1 + 1e-6


def test_sqrt_approx_minimal_degree():
    p, _ = sqrt_uniform_approx(0.1)
    q, err = sqrt_uniform_approx(0.1)
    assert p.coefficients.tolist() == q.coefficients.tolist()
    assert p.degree == 5


def test_sqrt_approx_cap():
    with pytest.raises(DegreeCapExceeded):
        sqrt_uniform_approx(0.03, cap=4)


def test_sqrt_grid_endpoints():
    g = sqrt_grid(1000)
    assert g[0] == 0.0 and g[-1] == 1.0 and len(g) == 1000


def test_identity_polynomial_transform():
    r = np.random.default_rng(1)
    F = RankFactorization(r.standard_normal((4, 3)), r.standard_normal((5, 3)))
    G = apply_poly_to_factorization(F, Polynomial([0.0, 1.0]))
    assert G.n == 4
    np.testing.assert_allclose(G.dense(), F.dense(), atol=1e-14)


def test_square_poly_zero_product():
    F = RankFactorization([[1.0, 1.0]], [[1.0, -1.0]])
    G = apply_poly_to_factorization(F, Polynomial([0.0, 0.0, 1.0]))
    assert abs(G.dense()[0, 0]) <= 1e-15


def test_poly_transform_rank2_half_interpolant():
    A = rank_matrix(4, 5, 2, seed=3)
    F = rank_factorize(A)
    p = Polynomial(HALF_INTERPOLANT)
    G = apply_poly_to_factorization(F, p)
    oracle = np.polynomial.polynomial.polyval(A, HALF_INTERPOLANT)
    assert np.max(np.abs(G.dense() - oracle)) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 4), st.integers(0, 1000))
def test_dimension_and_transform_laws(n, k, seed):
    r = np.random.default_rng(seed)
    F = RankFactorization(r.uniform(-1, 1, (6, n)), r.uniform(-1, 1, (5, n)))
    c = r.standard_normal(k + 1)
    c[-1] = 1.0
    G = apply_poly_to_factorization(F, Polynomial(c))
    assert G.n == math.comb(n + k, k)
    want = np.polynomial.polynomial.polyval(F.dense(), c)
    np.testing.assert_allclose(G.dense(), want, rtol=1e-9, atol=1e-9)
    S = square_factorization(G)
    np.testing.assert_allclose(S.gram(), G.dense() ** 2, rtol=1e-10, atol=1e-10)


def test_square_orthogonal_and_parallel():
    F = square_factorization(RankFactorization([[1.0, 0.0], [1.0, 1.0]], [[0.0, 1.0], [1.0, 1.0]]))
    assert F.gram()[0, 0] == 0.0
    assert F.gram()[1, 1] == 4.0


def test_rank_factorize():
    A = rank_matrix(7, 6, 3, seed=0)
    F = rank_factorize(A)
    assert F.n == 3
    np.testing.assert_allclose(F.dense(), A, atol=1e-13)
    assert rank_factorize(np.zeros((3, 2))).n == 0


def test_few_values_ones():
    F = psd_factorize_few_values(np.ones((3, 3)))
    assert F.r == 1
    np.testing.assert_allclose(F.gram(), 1.0)


def test_few_values_identity():
    F = psd_factorize_few_values(np.eye(2))
    assert F.r <= 3
    assert np.max(np.abs(F.gram() - np.eye(2))) <= 1e-10


def test_few_values_bound_random_01():
    r = np.random.default_rng(2)
    A = (r.random((6, 7)) < 0.5).astype(float)
    F = psd_factorize_few_values(A)
    rank = np.linalg.matrix_rank(A)
    assert F.r <= math.comb(1 + rank, 1)
    assert verify_psd_factorization(A, F).passed


def test_few_values_rejects_negative():
    with pytest.raises(NegativeEntry):
        psd_factorize_few_values(np.array([[1.0, -1.0]]))


def test_few_values_requires_values_with_factorization():
    with pytest.raises(ValueError):
        psd_factorize_few_values(RankFactorization(np.ones((2, 1)), np.ones((2, 1))))


def test_distinct_values_merge():
    np.testing.assert_array_equal(distinct_values([[0.0, 1e-12, 1.0]]), [0.0, 1.0])


def test_approx_zero_matrix():
    eps = 0.5
    A_prime, F, bound = approx_low_psd_rank(np.zeros((3, 3)), eps)
    p, _ = sqrt_uniform_approx(eps)
    np.testing.assert_allclose(A_prime, p(0.0) ** 2)
    assert np.max(A_prime) <= (eps / 3) ** 2 + 1e-15
    assert bound == 1


def test_approx_binary_matrix():
    r = np.random.default_rng(5)
    A = (r.random((8, 8)) < 0.4).astype(float)
    A_prime, F, _ = approx_low_psd_rank(A, 0.2)
    assert np.max(np.abs(A - A_prime)) <= 0.2


@pytest.mark.parametrize("eps", [0.3, 0.1])
def test_approx_rank3(eps):
    A = rank_matrix(20, 20, 3, seed=11)
    A_prime, F, bound = approx_low_psd_rank(A, eps)
    assert np.max(np.abs(A - A_prime)) <= eps
    assert np.max(np.abs(F.gram() - A_prime)) <= 1e-8
    p, _ = sqrt_uniform_approx(eps)
    assert F.r == bound == math.comb(p.degree + 3, p.degree)


def test_approx_out_of_range():
    with pytest.raises(EntryOutOfRange):
        approx_low_psd_rank(np.array([[0.0, 1.5]]), 0.5)


def test_verify_ones_rank1():
    F = PsdFactorization(1, (np.ones(1),) * 3, (np.ones(1),) * 3)
    rep = verify_psd_factorization(np.ones((3, 3)), F)
    assert rep.max_residual == 0.0 and rep.passed


def test_verify_perturbed_diagonal():
    # 1x1 instance: U = [[1 - 2 tol]], V = [[1]] against a = 1
    tol = 1e-8
    F = PsdFactorization(1, (np.array([[1.0 - 2 * tol]]),), (np.array([[1.0]]),))
    rep = verify_psd_factorization(np.ones((1, 1)), F, tol=tol)
    assert rep.max_residual == pytest.approx(2 * tol, rel=1e-6)
    assert not rep.passed


def test_verify_non_psd_plant():
    F = PsdFactorization(2, (np.diag([1.0, -1.0]),), (np.eye(2),))
    rep = verify_psd_factorization(np.zeros((1, 1)), F)
    assert rep.min_eigenvalue_left == -1.0
    assert not rep.passed
