"""Origin-centered minimum-volume enclosing ellipsoids and John decompositions.

The ellipsoid is found through its dual, the D-optimal design problem

    maximize log det(sum_i u_i x_i x_i^T)  over the probability simplex,

by Frank-Wolfe ascent with Wolfe away-steps (toward steps move mass onto the
point of largest Mahalanobis norm, away steps remove mass from the supported
point of smallest norm and can zero it exactly).  At the optimum
``M = (D * Lam)^{-1}`` defines the ellipsoid ``{x : x^T M x <= 1}``.

A run is converged when

    max_i  x_i^T Lam^{-1} x_i <= D (1 + gap_tol)
    min_{u_i > 0} x_i^T Lam^{-1} x_i >= D (1 - gap_tol)

The first line is the duality-gap certificate of minimum volume and gives
containment with slack ``gap_tol``; the second makes every supported point
a contact point to the same tolerance.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateSpan, IterationLimit, ResidualTooLarge
from .linalg import min_eigenvalue, psd_sqrt

WEIGHT_FLOOR = 1e-10
# exact refresh of Lam^{-1} between kernel chunks bounds rank-one update drift
_CHUNK = 500


@dataclass(frozen=True)
class CenteredEllipsoid:
    M: np.ndarray

    @property
    def dim(self):
        return self.M.shape[0]

    def norms(self, points):
        """``x^T M x`` for every row of ``points``."""
        P = np.asarray(points, dtype=np.float64)
        return np.einsum("ij,jk,ik->i", P, self.M, P)

    def contains(self, points, slack=0.0):
        return bool(np.all(self.norms(points) <= 1.0 + slack))


@dataclass(frozen=True)
class JohnDecomposition:
    indices: np.ndarray
    weights: np.ndarray
    frame: np.ndarray
    residual: float = 0.0

    @property
    def dim(self):
        return self.frame.shape[0]


@dataclass
class JohnReport:
    sum_error: float
    frobenius_error: float
    max_contact_slack: float
    frame_min_eigenvalue: float
    passed: bool = field(default=True)


@dataclass
class MveeResult:
    """Best iterate, attached to an IterationLimit."""

    ellipsoid: CenteredEllipsoid
    weights: np.ndarray
    gap: float
    iterations: int


def _moment_inverse(X, u):
    Lam = (X.T * u) @ X
    Linv = np.linalg.inv(Lam)
    Linv = 0.5 * (Linv + Linv.T)
    g = np.einsum("ij,jk,ik->i", X, Linv, X)
    return Lam, np.ascontiguousarray(Linv), g


def optimality_gap(points, weights):
    """``max_i x_i^T Lam^{-1} x_i - D`` at the given design weights."""
    X = np.asarray(points, dtype=np.float64)
    _, _, g = _moment_inverse(X, np.asarray(weights, dtype=np.float64))
    return float(g.max() - X.shape[1])


def mvee_centered(points, gap_tol=1e-7, max_iter=200_000):
    """Minimum-volume origin-centered ellipsoid containing ``points``.

    Returns ``(CenteredEllipsoid, weights)``.  Raises DegenerateSpan when the
    points do not span R^D and IterationLimit (payload: MveeResult with the
    best iterate) when ``max_iter`` steps do not reach ``gap_tol``.
    """
    if gap_tol <= 0:
        raise ValueError("gap_tol must be positive")
    X = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=np.float64)))
    n, D = X.shape
    if n == 0:
        raise DegenerateSpan("empty point set")
    sv = np.linalg.svd(X, compute_uv=False)
    if sv.size < D or sv[0] == 0 or sv[-1] <= 1e-10 * sv[0]:
        raise DegenerateSpan(f"points span fewer than {D} dimensions")

    u = np.full(n, 1.0 / n)
    done = 0
    while True:
        Lam, Linv, g = _moment_inverse(X, u)
        gap_plus = g.max() / D - 1.0
        support = u > 0
        gap_minus = 1.0 - g[support].min() / D
        if gap_plus <= gap_tol and gap_minus <= gap_tol:
            break
        if done >= max_iter:
            M = np.linalg.inv(D * Lam)
            best = MveeResult(CenteredEllipsoid(0.5 * (M + M.T)), u.copy(), float(gap_plus), done)
            raise IterationLimit(
                f"no convergence to gap_tol={gap_tol:g} in {max_iter} iterations (gap {gap_plus:.3e})",
                payload=best,
            )
        steps, status = kernels.fw_steps(X, u, Linv, g, min(_CHUNK, max_iter - done), gap_tol)
        # status -1 (singular downdate) only arises from drift; the refresh fixes it
        done += max(steps, 1)
    M = np.linalg.inv(D * Lam)
    return CenteredEllipsoid(0.5 * (M + M.T)), u


def extract_john_decomposition(ellipsoid, points, weights, contact_tol=1e-6):
    """Contact points and weights satisfying the John identity in the unit-ball frame."""
    X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    w = np.asarray(weights, dtype=np.float64)
    D = ellipsoid.dim
    keep = np.flatnonzero(w > WEIGHT_FLOOR * w.max())
    alpha = w[keep] / w[keep].sum()
    frame = psd_sqrt(ellipsoid.M)
    Y = X[keep] @ frame
    residual = float(np.linalg.norm((Y.T * alpha) @ Y - np.eye(D) / D))
    if residual > 10 * D * contact_tol:
        raise ResidualTooLarge(
            f"John identity residual {residual:.3e} exceeds {10 * D * contact_tol:.3e}",
            payload=JohnDecomposition(keep, alpha, frame, residual),
        )
    return JohnDecomposition(keep, alpha, frame, residual)


def verify_john(dec, points, tol=None):
    """Recompute the residuals of a John decomposition.

    With ``tol`` given, ``passed`` requires all three residuals within
    ``tol`` (identity within ``10 * D * tol``) and a positive definite frame.
    """
    X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    F = np.asarray(dec.frame, dtype=np.float64)
    D = F.shape[0]
    idx = np.asarray(dec.indices, dtype=np.int64)
    alpha = np.asarray(dec.weights, dtype=np.float64)
    Y = X[idx] @ F
    sum_error = float(abs(alpha.sum() - 1.0))
    frob = float(np.linalg.norm((Y.T * alpha) @ Y - np.eye(D) / D))
    contact = float(np.max(np.abs(np.sum(Y * Y, axis=1) - 1.0))) if len(idx) else 0.0
    asym = float(np.max(np.abs(F - F.T))) if D else 0.0
    fmin = min_eigenvalue(F) if asym <= 1e-12 * max(1.0, float(np.max(np.abs(F)))) else -np.inf
    passed = True
    if tol is not None:
        passed = (
            sum_error <= tol
            and frob <= 10 * D * tol
            and contact <= tol
            and fmin > 0
            and bool(np.all(alpha >= 0))
        )
    return JohnReport(sum_error, frob, contact, fmin, passed)

