# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  Signatures mirror ``_fallback`` exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, hypot, sqrt

cnp.import_array()


def jacobi_eigh(a_in, double tol=1e-15, int max_sweeps=100):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a_arr = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] A = a_arr
    cdef double[:, ::1] V = v_arr
    cdef Py_ssize_t p, q, r
    cdef int sweep
    cdef double fro = 0.0, off, apq, app, aqq, theta, t, c, s, arp, arq
    for p in range(n):
        for q in range(n):
            fro += A[p, q] * A[p, q]
    fro = sqrt(fro)
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += A[p, q] * A[p, q]
        if sqrt(2.0 * off) <= tol * fro:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if fabs(apq) <= 1e-300:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + hypot(theta, 1.0))
                else:
                    t = -1.0 / (-theta + hypot(theta, 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for r in range(n):
                    if r == p or r == q:
                        continue
                    arp = A[r, p]
                    arq = A[r, q]
                    A[r, p] = c * arp - s * arq
                    A[p, r] = A[r, p]
                    A[r, q] = s * arp + c * arq
                    A[q, r] = A[r, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for r in range(n):
                    arp = V[r, p]
                    arq = V[r, q]
                    V[r, p] = c * arp - s * arq
                    V[r, q] = s * arp + c * arq
    w = np.diagonal(a_arr).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v_arr[:, order]


def monomial_lift(x_in, exps_in, coef_in):
    cdef const double[:, ::1] X = np.ascontiguousarray(x_in, dtype=np.float64)
    cdef const long long[:, ::1] E = np.ascontiguousarray(exps_in, dtype=np.int64)
    cdef const double[::1] C = np.ascontiguousarray(coef_in, dtype=np.float64)
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], m = E.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, a, j
    cdef long long e, t
    cdef double val, xv
    for i in range(n):
        for a in range(m):
            val = C[a]
            for j in range(d):
                e = E[a, j]
                xv = X[i, j]
                for t in range(e):
                    val *= xv
            out[i, a] = val
    return out_arr


def fw_steps(double[:, ::1] X, double[::1] u, double[:, ::1] Linv, double[::1] g,
             long max_steps, double gap_tol):
    cdef Py_ssize_t n = X.shape[0], D = X.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w_arr = np.empty(D, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] h_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef double[::1] h = h_arr
    cdef Py_ssize_t i, a, b, jmax, imin, idx
    cdef long step
    cdef double gmax, gmin, eps_plus, eps_minus, kappa, tau, tau_max, denom, scale, dD = <double>D
    cdef bint drop
    for step in range(max_steps):
        jmax = 0
        gmax = g[0]
        imin = -1
        gmin = 0.0
        for i in range(n):
            if g[i] > gmax:
                gmax = g[i]
                jmax = i
            if u[i] > 0.0 and (imin < 0 or g[i] < gmin):
                gmin = g[i]
                imin = i
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
            if kappa > 1.0:
                tau = (dD - kappa) / (dD * (kappa - 1.0))
            else:
                tau = tau_max
            if tau >= tau_max:
                tau = tau_max
                drop = True
            tau = -tau
        # tau > 0 moves toward idx, tau < 0 moves away from it
        denom = (1.0 - tau) + tau * kappa
        if denom <= 1e-12:
            return step, -1
        for a in range(D):
            w[a] = 0.0
            for b in range(D):
                w[a] += Linv[a, b] * X[idx, b]
        for i in range(n):
            h[i] = 0.0
            for a in range(D):
                h[i] += X[i, a] * w[a]
        scale = 1.0 / (1.0 - tau)
        for a in range(D):
            for b in range(D):
                Linv[a, b] = scale * (Linv[a, b] - tau * w[a] * w[b] / denom)
        for i in range(n):
            g[i] = scale * (g[i] - tau * h[i] * h[i] / denom)
            u[i] *= (1.0 - tau)
        u[idx] += tau
        if drop:
            u[idx] = 0.0
    return max_steps, 0
