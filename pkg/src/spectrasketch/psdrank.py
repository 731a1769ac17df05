"""Constructive upper bounds on positive semidefinite rank.

A nonnegative matrix ``A`` has psd rank at most ``r`` when there are r x r
positive semidefinite ``U_i``, ``V_j`` with ``a_ij = <U_i, V_j>``.  The
constructions here are:

* a polynomial ``p`` of degree ``k`` applied entrywise to a matrix of rank
  ``n`` gives rank at most ``C(n + k, k)`` (explicit factors built from
  symmetric lifts of the original factors);
* squaring a rank-``n`` factorization entrywise gives psd rank at most ``n``
  (``U_i = u_i u_i^T``, ``V_j = v_j v_j^T``);
* composing the two with ``p ~ sqrt`` on the entry values gives exact psd
  factorizations of matrices with few distinct entries, and uniform
  approximations for arbitrary matrices with entries in [0, 1].
"""

from dataclasses import dataclass
import math

import numpy as np
from numpy.polynomial import chebyshev as cheb
from numpy.polynomial import Chebyshev, Polynomial as NumpyPolynomial

from .errors import (
    DegreeCapExceeded,
    EntryOutOfRange,
    NegativeEntry,
    NodesTooClose,
    ResidualTooLarge,
)
from .linalg import min_eigenvalue
from .tensor import binomial, sym_lift_matrix

GRID_SIZE = 100_000
DEGREE_CAP = 400
RANK_TOL = 1e-10
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial in the monomial basis, ``coefficients[m]`` multiplies t**m."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=np.float64))
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        out = np.zeros_like(t) + self.coefficients[-1]
        for c in self.coefficients[-2::-1]:
            out = out * t + c
        return out


@dataclass(frozen=True)
class RankFactorization:
    """``b_ij = <left[i], right[j]>`` with vectors stored as rows."""

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        L = np.asarray(self.left, dtype=np.float64)
        R = np.asarray(self.right, dtype=np.float64)
        if L.ndim != 2 or R.ndim != 2 or L.shape[1] != R.shape[1]:
            raise ValueError("left and right factors need matching inner dimension")
        object.__setattr__(self, "left", L)
        object.__setattr__(self, "right", R)

    @property
    def n(self):
        return self.left.shape[1]

    def dense(self):
        return self.left @ self.right.T


@dataclass(frozen=True)
class PsdFactorization:
    """Families of r x r psd matrices with ``a_ij = <U_i, V_j>``.

    Each entry of ``left``/``right`` is either a 1-D vector ``w`` standing for
    the rank-one matrix ``w w^T`` or a full 2-D symmetric matrix.
    """

    r: int
    left: tuple
    right: tuple

    @staticmethod
    def expand(entry):
        e = np.asarray(entry, dtype=np.float64)
        return np.outer(e, e) if e.ndim == 1 else e

    def all_rank1(self):
        return all(np.ndim(e) == 1 for e in self.left) and all(np.ndim(e) == 1 for e in self.right)

    def gram(self):
        """Dense matrix of Frobenius products ``<U_i, V_j>``."""
        if self.all_rank1():
            W = np.array(self.left, dtype=np.float64).reshape(len(self.left), self.r)
            Z = np.array(self.right, dtype=np.float64).reshape(len(self.right), self.r)
            return (W @ Z.T) ** 2
        U = np.array([self.expand(e) for e in self.left]).reshape(len(self.left), self.r, self.r)
        V = np.array([self.expand(e) for e in self.right]).reshape(len(self.right), self.r, self.r)
        return np.einsum("iab,jab->ij", U, V)


@dataclass
class PsdReport:
    max_residual: float
    min_eigenvalue_left: float
    min_eigenvalue_right: float
    passed: bool


# --- interpolation and uniform approximation --------------------------------


def lagrange_interpolate(nodes, values):
    """Polynomial of degree < len(nodes) through ``(nodes[i], values[i])``.

    Newton divided differences, expanded into the monomial basis.
    """
    x = np.asarray(nodes, dtype=np.float64).ravel()
    y = np.asarray(values, dtype=np.float64).ravel()
    if len(x) != len(y) or len(x) == 0:
        raise ValueError("need equally many nodes and values")
    if len(x) > 1:
        xs = np.sort(x)
        spread = xs[-1] - xs[0]
        gap = np.min(np.diff(xs))
        if gap <= 1e-12 * spread or spread == 0:
            raise NodesTooClose(f"nodes {gap:.3e} apart over a range of {spread:.3e}")
    coef = y.copy()
    for level in range(1, len(x)):
        coef[level:] = (coef[level:] - coef[level - 1 : -1]) / (x[level:] - x[: len(x) - level])
    mono = np.array([coef[-1]])
    for i in range(len(x) - 2, -1, -1):
        # mono * (t - x_i) + coef_i
        shifted = np.concatenate([[0.0], mono])
        shifted[:-1] -= x[i] * mono
        shifted[0] += coef[i]
        mono = shifted
    p = Polynomial(mono)
    miss = np.abs(p(x) - y)
    if np.any(miss > 1e-9 * (1.0 + np.abs(y))):
        raise NodesTooClose(f"interpolant misses its data by {miss.max():.3e}; nodes are ill-conditioned")
    return p


def sqrt_grid(size=GRID_SIZE):
    """Quadratically spaced points on [0, 1], dense near 0 where sqrt bends."""
    s = np.linspace(0.0, 1.0, size)
    return s * s


def _alternation(err, count):
    """Indices of ``count`` alternating-sign local extrema of ``err`` (or None)."""
    nz = np.flatnonzero(err != 0)
    if nz.size == 0:
        return None
    signs = np.sign(err[nz])
    breaks = np.flatnonzero(np.diff(signs) != 0) + 1
    picks = []
    for run in np.split(nz, breaks):
        picks.append(int(run[np.argmax(np.abs(err[run]))]))
    if len(picks) < count:
        return None
    while len(picks) > count:
        if abs(err[picks[0]]) < abs(err[picks[-1]]):
            picks.pop(0)
        else:
            picks.pop()
    return np.array(picks)


def _remez_sqrt(deg, grid, target, iterations=40):
    """Near-minimax Chebyshev coefficients (on [0, 1]) for sqrt of degree ``deg``.

    Discrete Remez exchange on ``grid``, started from the alternation points
    of the Chebyshev interpolant.
    """
    x = 2.0 * grid - 1.0
    coeffs = cheb.chebinterpolate(lambda s: np.sqrt(np.clip((s + 1.0) / 2.0, 0.0, None)), deg)
    err = target - cheb.chebval(x, coeffs)
    best = (float(np.max(np.abs(err))), coeffs)
    ref = _alternation(err, deg + 2)
    if ref is None:
        nodes = (1.0 - np.cos(np.pi * np.arange(deg + 2) / (deg + 1))) / 2.0
        ref = np.unique(np.clip(np.searchsorted(grid, nodes), 0, len(grid) - 1))
        if len(ref) < deg + 2:
            return best[1]
    for _ in range(iterations):
        system = np.hstack([cheb.chebvander(x[ref], deg), ((-1.0) ** np.arange(deg + 2))[:, None]])
        try:
            sol = np.linalg.solve(system, target[ref])
        except np.linalg.LinAlgError:
            break
        coeffs, level = sol[:-1], abs(sol[-1])
        err = target - cheb.chebval(x, coeffs)
        top = float(np.max(np.abs(err)))
        if top < best[0]:
            best = (top, coeffs)
        if top - level <= 1e-6 * top:
            break
        new = _alternation(err, deg + 2)
        if new is None or np.array_equal(new, ref):
            break
        ref = new
    return best[1]


def _monomial_fit(deg, grid, target):
    c = _remez_sqrt(deg, grid, target)
    chebyshev_error = float(np.max(np.abs(target - cheb.chebval(2.0 * grid - 1.0, c))))
    mono = Chebyshev(c, domain=[0.0, 1.0]).convert(kind=NumpyPolynomial).coef
    p = Polynomial(mono)
    return p, float(np.max(np.abs(target - p(grid)))), chebyshev_error


def sqrt_uniform_approx(eps, cap=DEGREE_CAP, grid_size=GRID_SIZE):
    """Lowest-degree polynomial found with ``|sqrt(t) - p(t)| <= eps/3`` on [0, 1].

    The degree doubles from 1 until the grid error passes, then a binary
    search finds the smallest passing degree.  Returns ``(p, sup_error)``
    where ``sup_error`` is measured on the returned monomial form over a
    ``grid_size``-point grid.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    goal = eps / 3.0
    grid = sqrt_grid(grid_size)
    target = np.sqrt(grid)
    tried = {}

    def attempt(deg):
        if deg not in tried:
            p, err, cheb_err = _monomial_fit(deg, grid, target)
            if cheb_err <= goal < err:
                raise DegreeCapExceeded(
                    f"degree {deg} meets eps/3 only in the Chebyshev basis; "
                    f"its monomial form is off by {err:.3e}"
                )
            tried[deg] = (p, err)
        return tried[deg][1] <= goal

    deg = 1
    while not attempt(deg):
        if deg >= cap:
            raise DegreeCapExceeded(f"no degree up to {cap} reaches sup error {goal:.3e}")
        deg = min(2 * deg, cap)
    lo, hi = deg // 2, deg
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if attempt(mid):
            hi = mid
        else:
            lo = mid
    return tried[hi]


# --- factorizations ----------------------------------------------------------


def rank_factorize(A, rel_tol=RANK_TOL):
    """Factor ``A = L R^T`` by Gaussian elimination with complete pivoting.

    Elimination stops once every remaining Schur-complement entry is at most
    ``rel_tol * max|A|``; the number of steps is the numerical rank.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    R = A.copy()
    scale = float(np.max(np.abs(A), initial=0.0))
    left, right = [], []
    for _ in range(min(A.shape)):
        flat = int(np.argmax(np.abs(R)))
        i, j = divmod(flat, R.shape[1])
        piv = R[i, j]
        if abs(piv) <= rel_tol * scale or piv == 0:
            break
        col = R[:, j].copy()
        row = R[i, :].copy()
        s = math.sqrt(abs(piv))
        left.append(col / s)
        right.append(row * (math.copysign(1.0, piv) / s))
        R -= np.outer(col, row) / piv
    if not left:
        return RankFactorization(np.zeros((A.shape[0], 0)), np.zeros((A.shape[1], 0)))
    return RankFactorization(np.array(left).T, np.array(right).T)


def apply_poly_to_factorization(F, p):
    """Factorization of ``[p(<u_i, v_j>)]`` of inner dimension ``C(n + deg p, deg p)``.

    Left rows are ``(a_0, a_1 u^(1), ..., a_k u^(k))`` and right rows are
    ``(1, v^(1), ..., v^(k))`` where ``u^(m)`` is the degree-m symmetric lift.
    """
    k = p.degree
    alpha = p.coefficients
    left = [np.full((F.left.shape[0], 1), alpha[0])]
    right = [np.ones((F.right.shape[0], 1))]
    if F.n > 0:
        for m in range(1, k + 1):
            left.append(alpha[m] * sym_lift_matrix(F.left, m))
            right.append(sym_lift_matrix(F.right, m))
    out = RankFactorization(np.hstack(left), np.hstack(right))
    assert out.n == binomial(F.n + k, k)
    return out


def square_factorization(F):
    """psd factorization of the entrywise square, ``U_i = u_i u_i^T``."""
    return PsdFactorization(
        r=F.n,
        left=tuple(np.array(row) for row in F.left),
        right=tuple(np.array(row) for row in F.right),
    )


def distinct_values(A, merge_tol=MERGE_TOL):
    """Sorted distinct entries, merging values within ``merge_tol`` of the previous one."""
    vals = np.unique(np.asarray(A, dtype=np.float64))
    if vals.size == 0:
        return vals
    keep = np.concatenate([[True], np.diff(vals) > merge_tol])
    return vals[keep]


def psd_factorize_few_values(A, S=None):
    """Exact psd factorization of a nonnegative matrix with few distinct entries.

    ``A`` is a dense matrix or a RankFactorization; ``S`` (required for a
    factorization) lists the distinct entry values.  The inner dimension is
    at most ``C(|S| - 1 + rank A, |S| - 1)``.
    """
    if isinstance(A, RankFactorization):
        if S is None:
            raise ValueError("distinct values S are required with a factorization")
        F = A
        dense = F.dense()
    else:
        dense = np.atleast_2d(np.asarray(A, dtype=np.float64))
        if np.any(dense < 0):
            raise NegativeEntry(f"entry {dense.min():.3e} is negative")
        F = rank_factorize(dense)
        if S is None:
            S = distinct_values(dense)
    S = np.asarray(S, dtype=np.float64)
    if np.any(S < 0):
        raise NegativeEntry("distinct values include a negative number")
    p = lagrange_interpolate(S, np.sqrt(S))
    P = square_factorization(apply_poly_to_factorization(F, p))
    bound = binomial(len(S) - 1 + F.n, len(S) - 1)
    assert P.r <= bound, (P.r, bound)
    scale = float(np.max(np.abs(dense), initial=0.0))
    residual = float(np.max(np.abs(P.gram() - dense), initial=0.0))
    if residual > 1e-7 * max(scale, 1e-300) and residual > 0:
        raise ResidualTooLarge(f"factorization residual {residual:.3e} (max entry {scale:.3e})", payload=P)
    return P


def approx_low_psd_rank(A, eps, p=None):
    """Entrywise ``eps``-approximation of ``A`` (entries in [0, 1]) with low psd rank.

    Returns ``(A_prime, factorization, rank_bound)``; ``A_prime`` is the
    entrywise square of ``p(A)`` where ``|sqrt(t) - p(t)| <= eps/3`` on [0, 1],
    so ``|a - a'| <= (eps/3)(2 + eps/3) <= eps``.  Pass ``p`` to reuse a
    polynomial from :func:`sqrt_uniform_approx`.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    if np.any(A < -1e-12) or np.any(A > 1.0 + 1e-12):
        raise EntryOutOfRange(f"entries must lie in [0, 1]; found range [{A.min():.6g}, {A.max():.6g}]")
    A = np.clip(A, 0.0, 1.0)
    if p is None:
        p, _ = sqrt_uniform_approx(eps)
    F = rank_factorize(A)
    G = apply_poly_to_factorization(F, p)
    P = square_factorization(G)
    A_prime = G.dense() ** 2
    return A_prime, P, binomial(p.degree + F.n, p.degree)


def verify_psd_factorization(A, F, tol=1e-8):
    """Recompute ``<U_i, V_j>`` against ``A`` and the eigenvalue floors.

    An entry counts as psd when its smallest eigenvalue is at least
    ``-tol * (1 + trace)``; rank-one entries are psd by construction and
    contribute eigenvalue 0.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))

    def floor(entries):
        worst, ok = np.inf, True
        for e in entries:
            e = np.asarray(e, dtype=np.float64)
            if e.ndim == 1:
                lam, tr = 0.0, float(e @ e)
            else:
                if np.max(np.abs(e - e.T), initial=0.0) > tol:
                    return -np.inf, False
                lam, tr = min_eigenvalue(e), float(np.trace(e))
            worst = min(worst, lam)
            ok = ok and lam >= -tol * (1.0 + abs(tr))
        return (0.0 if worst == np.inf else float(worst)), ok

    sizes_ok = all(
        (np.ndim(e) == 1 and len(e) == F.r) or np.shape(e) == (F.r, F.r) for e in F.left + F.right
    )
    if not sizes_ok or A.shape != (len(F.left), len(F.right)):
        return PsdReport(np.inf, -np.inf, -np.inf, False)
    residual = float(np.max(np.abs(F.gram() - A), initial=0.0))
    lmin, lok = floor(F.left)
    rmin, rok = floor(F.right)
    return PsdReport(residual, lmin, rmin, bool(residual <= tol and lok and rok))
