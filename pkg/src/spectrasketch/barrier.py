"""Dense log-det barrier path following for tiny equality-form SDPs.

Problems have the form

    maximize  c . xi   subject to  A xi = b,  W(xi) = Y - s I  positive definite

with ``xi = (z, svec(Y)[, s])``: ``q`` free variables, a symmetric ``r x r``
block ``Y`` and, for phase I, an optional shift ``s``.  Newton steps are
taken in a null-space parametrization of the affine constraints.
"""

from dataclasses import dataclass

import numpy as np

from .errors import IterationLimit
from .linalg import complement_basis, smat


@dataclass
class BarrierResult:
    xi: np.ndarray
    value: float
    status: str  # "optimal" | "unbounded" | "stopped"
    iterations: int
    gap: float


def _svec_to_vec(r):
    """Matrix S with vec(smat(y)) = S @ y."""
    m = r * (r + 1) // 2
    S = np.zeros((r * r, m))
    for a in range(m):
        e = np.zeros(m)
        e[a] = 1.0
        S[:, a] = smat(e, r).ravel()
    return S


def null_space(A, rel_tol=1e-10):
    if A.shape[0] == 0:
        return np.eye(A.shape[1])
    _, sv, vt = np.linalg.svd(A)
    rank = int(np.sum(sv > rel_tol * max(sv[0], 1e-300)))
    return vt[rank:].T


class _Problem:
    def __init__(self, A, b, c, q, r, shift):
        self.A, self.b, self.c = A, b, c
        self.q, self.r, self.shift = q, r, shift
        self.m = r * (r + 1) // 2
        self.S = _svec_to_vec(r)
        J = self.S
        if shift:
            J = np.hstack([J, -np.eye(r).ravel()[:, None]])
        self.J = J  # vec(W) = J @ xi[q:]

    def W(self, xi):
        Y = smat(xi[self.q : self.q + self.m], self.r)
        if self.shift:
            Y = Y - xi[-1] * np.eye(self.r)
        return Y

    def chol_ok(self, xi):
        try:
            np.linalg.cholesky(self.W(xi))
            return True
        except np.linalg.LinAlgError:
            return False

    def phi(self, xi, t):
        L = np.linalg.cholesky(self.W(xi))
        return -t * (self.c @ xi) - 2.0 * np.sum(np.log(np.diag(L)))

    def derivatives(self, xi, t):
        G = np.linalg.inv(self.W(xi))
        G = 0.5 * (G + G.T)
        grad = -t * self.c.copy()
        grad[self.q :] += -(self.J.T @ G.ravel())
        H = np.zeros((len(xi), len(xi)))
        H[self.q :, self.q :] = self.J.T @ np.kron(G, G) @ self.J
        return grad, H


def barrier_maximize(A, b, c, q, r, xi0, shift=False, tol=1e-8, t0=1.0, mu=5.0,
                     max_newton=2000, unbounded_at=1e9, stop_when=None):
    """Path following from the strictly feasible ``xi0``.

    ``stop_when(xi)`` may end the run early (phase I uses it to stop as
    soon as the shift turns positive).
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    prob = _Problem(A, b, c, q, r, shift)
    xi = np.asarray(xi0, dtype=np.float64).copy()
    if A.shape[0]:
        xi -= np.linalg.lstsq(A, A @ xi - b, rcond=None)[0]
    if not prob.chol_ok(xi):
        raise ValueError("starting point is not strictly feasible")
    N = null_space(A)
    # feasible directions that leave W unchanged see no barrier at all: the
    # objective must vanish on them, and Newton works on the rest
    flat = null_space(prob.J @ N[q:]) if N.shape[1] else N
    if flat.shape[1]:
        drift = flat.T @ (N.T @ c)
        if np.linalg.norm(drift) > 1e-9 * max(np.linalg.norm(c), 1e-300):
            return BarrierResult(xi, float(c @ xi), "unbounded", 0, np.inf)
        N = N @ complement_basis(flat, N.shape[1])
    t = t0
    newton = 0
    while True:
        for _ in range(100):
            if N.shape[1] == 0:
                break
            grad, H = prob.derivatives(xi, t)
            gr = N.T @ grad
            Hr = N.T @ H @ N
            Hr = 0.5 * (Hr + Hr.T)
            try:
                step_w = -np.linalg.solve(Hr, gr)
            except np.linalg.LinAlgError:
                step_w = -np.linalg.lstsq(Hr, gr, rcond=None)[0]
            dec2 = float(-gr @ step_w)
            if dec2 / 2.0 <= 1e-10:
                break
            step = N @ step_w
            alpha = 1.0
            phi0 = prob.phi(xi, t)
            while alpha > 1e-14:
                trial = xi + alpha * step
                if prob.chol_ok(trial) and prob.phi(trial, t) <= phi0 - 0.25 * alpha * dec2:
                    break
                alpha *= 0.5
            else:
                break
            xi = trial
            newton += 1
            if newton > max_newton:
                raise IterationLimit("barrier method ran out of Newton steps",
                                     payload=BarrierResult(xi, float(c @ xi), "stopped", newton, r / t))
            if stop_when is not None and stop_when(xi):
                return BarrierResult(xi, float(c @ xi), "stopped", newton, r / t)
            if abs(c @ xi) > unbounded_at:
                return BarrierResult(xi, float(c @ xi), "unbounded", newton, np.inf)
        if r / t <= tol:
            return BarrierResult(xi, float(c @ xi), "optimal", newton, r / t)
        t *= mu
