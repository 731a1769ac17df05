"""Pure numpy versions of the compiled kernels in ``_core.pyx``."""

import math

import numpy as np


def jacobi_eigh(a_in, tol=1e-15, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvectors as columns.
    """
    A = np.array(a_in, dtype=np.float64, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    fro = math.sqrt(float(np.sum(A * A)))
    iu = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        off = float(np.sum(A[iu] ** 2))
        if math.sqrt(2.0 * off) <= tol * fro:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + math.hypot(theta, 1.0))
                else:
                    t = -1.0 / (-theta + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                A[p, :] = A[:, p]
                A[q, :] = A[:, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    w = np.diagonal(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def monomial_lift(x_in, exps_in, coef_in):
    x = np.ascontiguousarray(x_in, dtype=np.float64)
    exps = np.asarray(exps_in, dtype=np.int64)
    coef = np.asarray(coef_in, dtype=np.float64)
    out = np.empty((x.shape[0], exps.shape[0]))
    for a in range(exps.shape[0]):
        col = np.full(x.shape[0], coef[a])
        for j in range(x.shape[1]):
            for _ in range(int(exps[a, j])):
                col = col * x[:, j]
        out[:, a] = col
    return out


def fw_steps(X, u, Linv, g, max_steps, gap_tol):
    """Toward/away Frank-Wolfe steps on the centered D-optimal design problem.

    Updates ``u``, ``Linv`` and ``g`` in place and returns ``(steps, status)``
    with status 1 on convergence, 0 when ``max_steps`` ran out and -1 when a
    rank-one downdate would make the moment matrix singular.
    """
    n, D = X.shape
    dD = float(D)
    for step in range(max_steps):
        jmax = int(np.argmax(g))
        gmax = g[jmax]
        support = np.flatnonzero(u > 0.0)
        imin = int(support[np.argmin(g[support])])
        gmin = g[imin]
        eps_plus = gmax / dD - 1.0
        eps_minus = 1.0 - gmin / dD
        if eps_plus <= gap_tol and eps_minus <= gap_tol:
            return step, 1
        drop = False
        if eps_plus >= eps_minus or u[imin] >= 1.0:
            idx = jmax
            kappa = gmax
            tau = (kappa - dD) / (dD * (kappa - 1.0))
        else:
            idx = imin
            kappa = gmin
            tau_max = u[idx] / (1.0 - u[idx])
            tau = (dD - kappa) / (dD * (kappa - 1.0)) if kappa > 1.0 else tau_max
            if tau >= tau_max:
                tau = tau_max
                drop = True
            tau = -tau
        denom = (1.0 - tau) + tau * kappa
        if denom <= 1e-12:
            return step, -1
        w = Linv @ X[idx]
        h = X @ w
        scale = 1.0 / (1.0 - tau)
        Linv -= (tau / denom) * np.outer(w, w)
        Linv *= scale
        g -= (tau / denom) * h * h
        g *= scale
        u *= 1.0 - tau
        u[idx] += tau
        if drop:
            u[idx] = 0.0
    return max_steps, 0
