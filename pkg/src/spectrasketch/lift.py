"""Spectrahedral lifts of integer point sets, exact in bounded-width directions.

For integer points ``B`` and width budget ``k`` every integer direction ``v``
with ``max_B <u, v> - min_B <u, v> <= k`` gets a lifted vector
``v_hat = (v, k - m)`` where ``m = max_B <u, v>``; points lift to
``u_hat = (u, 1)``.  The slack matrix

    a_ij = 1 - <u_hat_i, v_hat_j> / k   (in {0, 1/k, ..., 1})

has rank at most d + 2 and at most k + 1 distinct values, so it has an
explicit psd factorization ``a_ij = <U_i, V_j>`` of size at most
``C(d + k + 2, k)``.  The convex set

    C = {x : exists X psd with  1 - <(x, 1), v_hat_j> / k = <X, V_j>  for all j}

contains ``B`` (witness ``X = U_i``) and satisfies ``<x, v_j> <= m_j`` on all
of ``C`` because ``<X, V_j> >= 0``; so its maximum in every enumerated
direction equals the maximum over ``B``.  The constraints only see ``x``
through ``<x, v_j>``, so ``C`` is a cylinder along the orthogonal
complement of ``span(v_j)``.
"""

from dataclasses import dataclass, field
import itertools

import numpy as np

from .barrier import barrier_maximize, null_space
from .errors import AssemblyResidual, EnumerationTooLarge, Infeasible, InconsistentInputs
from .linalg import complement_basis, eigh, min_eigenvalue, orthonormal_basis, smat, svec
from .psdrank import PsdFactorization, RankFactorization, psd_factorize_few_values
from .tensor import binomial

ENUMERATION_CAP = 1_000_000


def as_integer_points(B):
    P = np.atleast_2d(np.asarray(B))
    if P.size == 0 or P.ndim != 2:
        raise ValueError("empty point set")
    if not np.issubdtype(P.dtype, np.integer):
        F = np.asarray(P, dtype=np.float64)
        if not np.all(np.isfinite(F)) or np.any(F != np.round(F)):
            raise ValueError("points must have integer coordinates")
        P = np.round(F)
    return P.astype(np.int64)


@dataclass(frozen=True)
class DirectionSet:
    k: int
    v: np.ndarray
    m: np.ndarray
    width: np.ndarray
    radius: int = None

    def __len__(self):
        return len(self.m)

    @property
    def lifted(self):
        return np.hstack([self.v, (self.k - self.m)[:, None]])


@dataclass(frozen=True)
class SlackMatrix:
    k: int
    numerators: np.ndarray  # k * a_ij, exact integers

    @property
    def values(self):
        return self.numerators / self.k

    def distinct_values(self):
        return np.unique(self.numerators) / self.k


@dataclass(frozen=True)
class SpectrahedralLift:
    d: int
    k: int
    r: int
    v_hat: np.ndarray  # (J, d + 1) integers
    V: tuple  # psd matrices (rank-one vectors or full)
    u_hat: np.ndarray  # (I, d + 1) integers
    U: tuple
    span_basis: np.ndarray  # (d + 1, q): basis of span(v_hat)
    perp_basis: np.ndarray  # (d, d - q'): basis of the free subspace inside R^d

    @property
    def factorization(self):
        return PsdFactorization(self.r, self.U, self.V)

    def slack(self, x_hat):
        """``1 - <x_hat, v_hat_j> / k`` for every constraint."""
        return 1.0 - (self.v_hat @ np.asarray(x_hat, dtype=np.float64)) / self.k

    def constraint_residuals(self, x, X):
        """``slack_j(x) - <X, V_j>``; all zero on the lifted set."""
        X = np.asarray(X, dtype=np.float64)
        x_hat = np.append(np.asarray(x, dtype=np.float64), 1.0)
        vals = np.array([np.sum(PsdFactorization.expand(Vj) * X) for Vj in self.V])
        return self.slack(x_hat) - vals


@dataclass
class DirectionCheck:
    v: np.ndarray
    m: int
    attained_by: int
    dual_valid: bool


@dataclass
class ExactnessReport:
    directions: list
    identity_residual: float
    min_eig_floor: float
    passed: bool
    problems: list = field(default_factory=list)


@dataclass
class LiftOptimum:
    value: float
    status: str  # "optimal" | "unbounded"
    face: str = ""
    gap: float = 0.0


def enumerate_directions(B, k, radius, cap=ENUMERATION_CAP):
    """All integer ``v`` with ``|v|_inf <= radius`` and width at most ``k``.

    ``v = 0`` is always included.  Order is lexicographic in ``v``.
    """
    P = as_integer_points(B)
    if k < 1:
        raise ValueError("k must be positive")
    if radius < 1:
        raise ValueError("radius must be positive")
    d = P.shape[1]
    count = (2 * radius + 1) ** d
    if count > cap:
        raise EnumerationTooLarge(f"{count} candidate directions exceed the cap of {cap}")
    cand = np.array(list(itertools.product(range(-radius, radius + 1), repeat=d)), dtype=np.int64)
    vals = P @ cand.T
    m = vals.max(axis=0)
    width = m - vals.min(axis=0)
    keep = width <= k
    return DirectionSet(k, cand[keep], m[keep], width[keep], radius)


def build_slack_matrix(B, dirs, k):
    P = as_integer_points(B)
    if dirs.k != k:
        raise InconsistentInputs(f"directions were built for k={dirs.k}, not {k}")
    vals = P @ dirs.v.T
    m = vals.max(axis=0)
    if not np.array_equal(m, dirs.m):
        raise InconsistentInputs("direction maxima disagree with the point set")
    num = m[None, :] - vals
    if num.size and (num.min() < 0 or num.max() > k):
        raise InconsistentInputs("a direction exceeds the width budget")
    return SlackMatrix(k, num)


def build_lift(B, dirs, k):
    P = as_integer_points(B)
    slack = build_slack_matrix(P, dirs, k)
    n, d = P.shape
    u_hat = np.hstack([P, np.ones((n, 1), dtype=np.int64)])
    v_hat = dirs.lifted
    # a_ij = <(1, -u_hat_i / k), (1, v_hat_j)>: rank at most d + 2
    F = RankFactorization(
        np.hstack([np.ones((n, 1)), -u_hat / k]),
        np.hstack([np.ones((len(dirs), 1)), v_hat.astype(np.float64)]),
    )
    factor = psd_factorize_few_values(F, slack.distinct_values())
    bound = binomial(d + k + 2, k)
    if factor.r > bound:
        raise AssemblyResidual(f"psd size {factor.r} exceeds C(d+k+2, k) = {bound}")
    residual = float(np.max(np.abs(factor.gram() - slack.values), initial=0.0))
    if residual > 1e-7:
        raise AssemblyResidual(f"certificate identity residual {residual:.3e}")
    span = orthonormal_basis(v_hat.astype(np.float64))
    span_d = orthonormal_basis(dirs.v.astype(np.float64))
    return SpectrahedralLift(
        d=d,
        k=k,
        r=factor.r,
        v_hat=v_hat,
        V=factor.right,
        u_hat=u_hat,
        U=factor.left,
        span_basis=span,
        perp_basis=complement_basis(span_d, d),
    )


def _psd_floor(entry):
    e = np.asarray(entry, dtype=np.float64)
    if e.ndim == 1:
        return 0.0, float(e @ e)
    if np.max(np.abs(e - e.T), initial=0.0) > 1e-12 * max(1.0, float(np.max(np.abs(e)))):
        return -np.inf, float(np.trace(e))
    return min_eigenvalue(e), float(np.trace(e))


def certify_exactness(lift, B, dirs, tol=1e-8):
    """Check the three facts that make the lift exact in every listed direction.

    (i) ``a_ij = <U_i, V_j>`` within ``tol``; (ii) every ``U_i`` and ``V_j`` is
    psd within ``-tol * (1 + trace)``; (iii) each direction's maximum over
    ``B`` is attained by a point with zero slack.  Together: every feasible
    ``(x, X)`` has ``<x, v_j> = m_j - k <X, V_j> <= m_j``, with equality at
    the attaining point.
    """
    P = as_integer_points(B)
    problems = []
    n, d = P.shape
    u_hat = np.hstack([P, np.ones((n, 1), dtype=np.int64)])
    if lift.u_hat.shape != u_hat.shape or not np.array_equal(lift.u_hat, u_hat):
        problems.append("certificate points do not match the point set")
    if lift.v_hat.shape != dirs.lifted.shape or not np.array_equal(lift.v_hat, dirs.lifted):
        problems.append("constraint directions do not match the direction set")
    if lift.k != dirs.k or lift.d != d:
        problems.append("lift parameters do not match")
    if len(lift.U) != n or len(lift.V) != len(dirs):
        problems.append("certificate counts do not match")
    if problems:
        return ExactnessReport([], np.inf, -np.inf, False, problems)

    a = 1.0 - (u_hat @ lift.v_hat.T) / lift.k
    shapes_ok = all(
        (np.ndim(e) == 1 and len(e) == lift.r) or np.shape(e) == (lift.r, lift.r) for e in lift.U + lift.V
    )
    if shapes_ok:
        identity = float(np.max(np.abs(lift.factorization.gram() - a), initial=0.0))
    else:
        identity = np.inf
        problems.append("certificate matrices have the wrong size")
    floors = [_psd_floor(e) for e in lift.U]
    left_ok = [lam >= -tol * (1.0 + abs(tr)) for lam, tr in floors]
    vals = P @ dirs.v.T
    checks = []
    worst = min((lam for lam, _ in floors), default=0.0)
    for j in range(len(dirs)):
        m_j = int(vals[:, j].max())
        i_star = int(np.argmax(vals[:, j]))
        lam, tr = _psd_floor(lift.V[j])
        worst = min(worst, lam)
        ok = lam >= -tol * (1.0 + abs(tr)) and m_j == int(dirs.m[j]) and abs(a[i_star, j]) <= tol
        checks.append(DirectionCheck(dirs.v[j].copy(), m_j, i_star, bool(ok)))
    if not all(left_ok):
        problems.append("a point certificate is not psd")
    if identity > tol:
        problems.append(f"identity residual {identity:.3e} exceeds {tol:.1e}")
    bad = [j for j, ch in enumerate(checks) if not ch.dual_valid]
    if bad:
        problems.append(f"directions {bad[:5]} fail their dual check")
    passed = not problems
    return ExactnessReport(checks, identity, float(worst), passed, problems)


# --- optimization over the lift ----------------------------------------------


def _widths(lift):
    """Integer widths of the constraint directions over the certificate points."""
    vals = lift.u_hat[:, :-1] @ lift.v_hat[:, :-1].T
    return vals.max(axis=0) - vals.min(axis=0)


def _face_from_kernel(K, rel=1e-10):
    w, v = eigh(K)
    scale = max(float(np.max(np.abs(w), initial=0.0)), 1.0)
    return v[:, w <= rel * scale]


def _face_from_range(K, rel=1e-10):
    w, v = eigh(K)
    scale = max(float(np.max(np.abs(w), initial=0.0)), 1e-300)
    return v[:, w > rel * scale]


def _system(lift, face, span_d):
    """Equality rows ``<x, v_j> + k <R Y R^T, V_j> = m_j`` in (z, svec Y)."""
    m = lift.k - lift.v_hat[:, -1]
    V = lift.v_hat[:, :-1].astype(np.float64)
    rows = []
    for j, Vj in enumerate(lift.V):
        reduced = face.T @ PsdFactorization.expand(Vj) @ face
        rows.append(np.concatenate([V[j] @ span_d, lift.k * svec(reduced)]))
    return np.array(rows), m.astype(np.float64)


def maximize_over_lift(lift, c, tol=1e-7):
    """``max <c, x>`` over the lifted convex set, by a log-det barrier method.

    The psd block is first restricted to the face forced by directions of
    width zero (their slack vanishes on the whole set), and a phase-I run
    looks for a strictly feasible point there.  If that face has no interior
    the block is restricted further to the range of the certificate matrices.
    """
    c = np.asarray(c, dtype=np.float64).ravel()
    d = lift.d
    if len(c) != d:
        raise ValueError(f"objective has length {len(c)}, expected {d}")
    scale = float(np.linalg.norm(c))
    if scale == 0.0:
        return LiftOptimum(0.0, "optimal", "", 0.0)
    if lift.perp_basis.shape[1] and np.linalg.norm(lift.perp_basis.T @ c) > tol * scale:
        return LiftOptimum(np.inf, "unbounded", "", 0.0)
    span_d = complement_basis(lift.perp_basis, d) if lift.perp_basis.shape[1] else np.eye(d)
    q = span_d.shape[1]
    U_full = [PsdFactorization.expand(e) for e in lift.U]
    U_mean = sum(U_full) / len(U_full)
    x_mean = lift.u_hat[:, :-1].mean(axis=0)
    V_full = [PsdFactorization.expand(e) for e in lift.V]
    # directions of X outside range(sum V_j) never meet a constraint; dropping
    # them leaves the projection unchanged and removes recession directions
    # that would make the barrier unbounded below
    R0 = _face_from_range(sum(V_full))
    flat = np.flatnonzero(_widths(lift) == 0)
    K = R0.T @ sum((V_full[j] for j in flat), np.zeros((lift.r, lift.r))) @ R0
    faces = (
        ("width-zero", R0 @ _face_from_kernel(K)),
        ("certificate", R0 @ _face_from_range(R0.T @ U_mean @ R0)),
    )
    for face_name, face in faces:
        rr = face.shape[1]
        A, b = _system(lift, face, span_d)
        Y0 = face.T @ U_mean @ face
        xi0 = np.concatenate([span_d.T @ x_mean, svec(Y0)])
        if rr == 0:
            # no psd freedom left: the set is the affine solution set of A z = b
            opt = _affine_optimum(A, b, span_d.T @ c, xi0, face_name)
            if opt is None:
                continue
            return opt
        xi0 = xi0 - np.linalg.lstsq(A, A @ xi0 - b, rcond=None)[0]
        if np.max(np.abs(A @ xi0 - b), initial=0.0) > 1e-9 * (1.0 + np.max(np.abs(b), initial=0.0)):
            continue
        Y0 = smat(xi0[q:], rr)
        lam0 = float(np.linalg.eigvalsh(Y0)[0])
        if lam0 <= 1e-9 * max(1.0, float(np.trace(Y0))):
            start = _phase_one(A, b, q, rr, xi0, lam0, tol)
            if start is None:
                continue
        else:
            start = xi0
        obj = np.concatenate([span_d.T @ c, np.zeros(len(xi0) - q)])
        res = barrier_maximize(A, b, obj, q, rr, start, tol=tol,
                               unbounded_at=1e9 * (1.0 + scale * (1.0 + np.abs(lift.v_hat).max())))
        if res.status == "unbounded":
            return LiftOptimum(np.inf, "unbounded", face_name, res.gap)
        return LiftOptimum(res.value, "optimal", face_name, res.gap)
    raise Infeasible("no strictly feasible point in any face; the lift is corrupted")


def _phase_one(A, b, q, r, xi0, lam0, tol):
    """Maximize the shift ``s`` with ``Y - s I`` psd; None when it stays <= 0."""
    lift_dir = np.concatenate([np.zeros(q), svec(np.eye(r))])
    if np.max(np.abs(A @ lift_dir), initial=0.0) <= 1e-12 * (1.0 + np.max(np.abs(A), initial=0.0)):
        # adding multiples of I keeps every constraint: shift straight inside
        return xi0 + (1.0 - lam0) * lift_dir
    s0 = lam0 - 1.0
    A1 = np.hstack([A, np.zeros((A.shape[0], 1))])
    obj = np.zeros(len(xi0) + 1)
    obj[-1] = 1.0
    start = np.append(xi0, s0)
    res = barrier_maximize(A1, b, obj, q, r, start, shift=True, tol=min(tol, 1e-10),
                           stop_when=lambda xi: xi[-1] > 1e-6)
    if res.xi[-1] > 0 and np.linalg.eigvalsh(smat(res.xi[q:-1], r))[0] > 0:
        return res.xi[:-1]
    return None


def _affine_optimum(A, b, cz, xi0, face_name):
    N = null_space(A)
    if N.shape[1] and np.linalg.norm(N[: len(cz)].T @ cz) > 1e-12 * (1 + np.linalg.norm(cz)):
        return LiftOptimum(np.inf, "unbounded", face_name, 0.0)
    xi = xi0 - np.linalg.lstsq(A, A @ xi0 - b, rcond=None)[0]
    if np.max(np.abs(A @ xi - b), initial=0.0) > 1e-9 * (1.0 + np.max(np.abs(b), initial=0.0)):
        return None
    return LiftOptimum(float(cz @ xi[: len(cz)]), "optimal", face_name, 0.0)
