"""Small dense linear-algebra helpers shared by the pipelines."""

import math

import numpy as np

from . import kernels


def eigh(a):
    """Symmetric eigendecomposition (ascending) via Jacobi rotations."""
    a = np.asarray(a, dtype=np.float64)
    if a.shape == (0, 0):
        return np.zeros(0), np.zeros((0, 0))
    return kernels.jacobi_eigh(0.5 * (a + a.T))


def min_eigenvalue(a):
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0:
        return 0.0
    return float(eigh(a)[0][0])


def psd_sqrt(a):
    """Symmetric square root of a positive semidefinite matrix."""
    w, v = eigh(a)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def svec(a):
    """Upper triangle of a symmetric matrix, off-diagonals scaled by sqrt(2).

    The Euclidean inner product of two such vectors equals the Frobenius
    inner product of the matrices.
    """
    a = np.asarray(a, dtype=np.float64)
    iu = np.triu_indices(a.shape[-1])
    scale = np.where(iu[0] == iu[1], 1.0, math.sqrt(2.0))
    return a[..., iu[0], iu[1]] * scale


def smat(v, n):
    """Inverse of :func:`svec`."""
    iu = np.triu_indices(n)
    scale = np.where(iu[0] == iu[1], 1.0, 1.0 / math.sqrt(2.0))
    out = np.zeros((n, n))
    out[iu] = np.asarray(v) * scale
    return out + np.triu(out, 1).T


def orthonormal_basis(vectors, rel_tol=1e-10):
    """Orthonormal basis (as columns) of the span of the rows of ``vectors``.

    Pivoted Gram-Schmidt with one reorthogonalization pass: at each step the
    row with the largest relative residual is taken, and the process stops
    once every row's residual is at most ``rel_tol`` times its own norm.
    """
    P = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    n, dim = P.shape
    norms = np.linalg.norm(P, axis=1)
    live = norms > 0
    R = P.copy()
    basis = []
    for _ in range(min(n, dim)):
        res = np.linalg.norm(R, axis=1)
        rel = np.zeros(n)
        rel[live] = res[live] / norms[live]
        i = int(np.argmax(rel))
        if rel[i] <= rel_tol:
            break
        q = R[i].copy()
        for _ in range(2):
            for b in basis:
                q -= (b @ q) * b
        q /= np.linalg.norm(q)
        basis.append(q)
        R -= np.outer(R @ q, q)
    if not basis:
        return np.zeros((dim, 0))
    return np.array(basis).T


def complement_basis(Q, dim):
    """Orthonormal basis of the orthogonal complement of ``range(Q)`` in R^dim."""
    Q = np.asarray(Q, dtype=np.float64).reshape(dim, -1)
    E = np.eye(dim) - Q @ Q.T
    if Q.shape[1] == dim:
        return np.zeros((dim, 0))
    C = orthonormal_basis(E, rel_tol=1e-8)
    return C[:, : dim - Q.shape[1]]


def kernel_vector(M, rel_tol=1e-12):
    """A nonzero vector ``lam`` with ``M @ lam`` ~ 0, or None if none is found.

    Column-pivoted Gaussian elimination: the unused column with the largest
    residual norm is eliminated next, and columns whose residual norm falls
    below ``rel_tol`` times the largest original column norm are free.
    """
    A = np.array(M, dtype=np.float64, copy=True)
    m, s = A.shape
    thresh = rel_tol * max(float(np.max(np.linalg.norm(A, axis=0))), 1e-300)
    pivots = []  # (row, col)
    used_rows = np.zeros(m, dtype=bool)
    free = list(range(s))
    while free:
        norms = np.linalg.norm(A[~used_rows][:, free], axis=0) if (~used_rows).any() else np.zeros(len(free))
        jpos = int(np.argmax(norms))
        if norms[jpos] <= thresh:
            break
        col = free.pop(jpos)
        rows = np.flatnonzero(~used_rows)
        row = int(rows[np.argmax(np.abs(A[rows, col]))])
        used_rows[row] = True
        A[row] /= A[row, col]
        others = np.arange(m) != row
        A[others] -= np.outer(A[others, col], A[row])
        pivots.append((row, col))
    if not free:
        return None
    f = free[0]
    lam = np.zeros(s)
    lam[f] = 1.0
    for row, col in pivots:
        lam[col] = -A[row, f]
    return lam
