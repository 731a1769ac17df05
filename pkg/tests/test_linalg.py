import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectrasketch import kernels
from spectrasketch.linalg import (
    complement_basis,
    eigh,
    kernel_vector,
    min_eigenvalue,
    orthonormal_basis,
    psd_sqrt,
    smat,
    svec,
)


def random_symmetric(n, seed):
    A = np.random.default_rng(seed).standard_normal((n, n))
    return A + A.T


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_jacobi_matches_numpy(backend, n):
    A = random_symmetric(n, n)
    w, V = eigh(A)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(A), atol=1e-12 * max(1, np.abs(A).max()))
    np.testing.assert_allclose(V @ np.diag(w) @ V.T, A, atol=1e-12)
    np.testing.assert_allclose(V.T @ V, np.eye(n), atol=1e-13)


def test_jacobi_backends_agree():
    A = random_symmetric(9, 1)
    res = []
    for name in kernels.available_backends():
        prev = kernels.use_backend(name)
        res.append(eigh(A)[0])
        kernels.use_backend(prev)
    for r in res[1:]:
        np.testing.assert_allclose(r, res[0], atol=1e-13)


def test_min_eigenvalue_indefinite():
    assert min_eigenvalue(np.diag([1.0, -1.0])) == -1.0


def test_psd_sqrt():
    A = np.array([[4.0, 0.0], [0.0, 9.0]])
    np.testing.assert_allclose(psd_sqrt(A), np.diag([2.0, 3.0]), atol=1e-14)
    B = random_symmetric(4, 2)
    B = B @ B.T
    S = psd_sqrt(B)
    np.testing.assert_allclose(S @ S, B, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 1000))
def test_svec_roundtrip_and_isometry(n, seed):
    A = random_symmetric(n, seed)
    B = random_symmetric(n, seed + 1)
    np.testing.assert_allclose(smat(svec(A), n), A, atol=1e-14)
    assert float(svec(A) @ svec(B)) == pytest.approx(float(np.sum(A * B)), rel=1e-12, abs=1e-12)


def test_orthonormal_basis_rank_deficient():
    r = np.random.default_rng(0)
    V = r.standard_normal((10, 3)) @ r.standard_normal((3, 6))
    Q = orthonormal_basis(V)
    assert Q.shape == (6, 3)
    np.testing.assert_allclose(Q.T @ Q, np.eye(3), atol=1e-13)
    np.testing.assert_allclose(V - (V @ Q) @ Q.T, 0, atol=1e-12)


def test_orthonormal_basis_empty():
    assert orthonormal_basis(np.zeros((4, 3))).shape == (3, 0)


def test_complement_basis():
    Q = orthonormal_basis(np.array([[1.0, 1.0, 0.0]]))
    C = complement_basis(Q, 3)
    assert C.shape == (3, 2)
    np.testing.assert_allclose(Q.T @ C, 0, atol=1e-14)
    np.testing.assert_allclose(C.T @ C, np.eye(2), atol=1e-14)


def test_kernel_vector():
    M = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 7.0]])
    lam = kernel_vector(M)
    assert lam is not None and np.linalg.norm(lam) > 0
    np.testing.assert_allclose(M @ lam, 0, atol=1e-12)
    assert kernel_vector(np.eye(3)) is None
