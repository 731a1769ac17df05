"""Small subsets of a point set that certify every linear functional.

For a finite ``B`` in R^d and a power ``k`` the sketch ``X`` satisfies, for
every direction ``y``,

    max_{x in B} |<y, x>|  <=  C(d+k-1, k) ** (1 / (2k)) * max_{x in X} |<y, x>|

with ``|X| <= 1 + D/2 + D**2/2`` where ``D = C(d+k-1, k)``.  ``X`` is taken
among the contact points of the minimum-volume centered ellipsoid of the
lifted set ``{x^(k) : x in B}``, thinned by Caratheodory reduction of the
John decomposition.
"""

from dataclasses import dataclass, field

import numpy as np

from . import caratheodory
from .errors import DegenerateSpan, DivisionDegenerate
from .linalg import orthonormal_basis, svec
from .mvee import JohnDecomposition, extract_john_decomposition, mvee_centered
from .tensor import lift_dim, sym_lift_matrix

SPAN_TOL = 1e-10


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        P = np.asarray(self.points, dtype=np.float64)
        if P.ndim != 2 or P.shape[0] == 0:
            raise ValueError("empty point set")
        object.__setattr__(self, "points", P)
        if self.labels is not None and len(self.labels) != len(P):
            raise ValueError("labels must match the number of points")

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class Sketch:
    source: PointSet
    k: int
    indices: np.ndarray
    factor_bound: float
    cardinality_bound: int
    john_residual: float
    effective_dim: int
    gap_tol: float
    john: JohnDecomposition = field(repr=False, default=None)
    basis: np.ndarray = field(repr=False, default=None)

    @property
    def points(self):
        return self.source.points[self.indices]


@dataclass
class SketchReport:
    worst_ratio: float
    worst_direction: np.ndarray
    passed: bool
    threshold: float
    n_dirs: int
    seed: int


def factor_bound(d, k):
    """``C(d+k-1, k) ** (1/(2k))``: one floating root of an exact integer."""
    return float(lift_dim(d, k)) ** (1.0 / (2 * k))


def cardinality_bound(d, k):
    D = lift_dim(d, k)
    return 1 + D * (D + 1) // 2


def lifted_coordinates(points, k, basis=None):
    """Lift the rows of ``points`` and express them in an orthonormal basis of
    the span of the lifts (computed unless given)."""
    L = sym_lift_matrix(points, k)
    if basis is None:
        basis = orthonormal_basis(L, SPAN_TOL)
    return L @ basis, basis, L


def build_sketch(B, k, gap_tol=1e-7, max_iter=200_000):
    if not isinstance(B, PointSet):
        B = PointSet(B)
    if k < 1:
        raise ValueError("k must be positive")
    d = B.dim
    Z, basis, _ = lifted_coordinates(B.points, k)
    n_eff = basis.shape[1]
    if n_eff == 0:
        raise DegenerateSpan("all points are zero")

    live = np.flatnonzero(np.any(Z != 0, axis=1))
    ellipsoid, u = mvee_centered(Z[live], gap_tol=gap_tol, max_iter=max_iter)
    john = extract_john_decomposition(ellipsoid, Z[live], u, contact_tol=gap_tol)
    Y = Z[live[john.indices]] @ john.frame
    dec = caratheodory.WeightedDecomposition(
        caratheodory.flatten_outer_products(Y),
        john.weights,
        svec(np.eye(n_eff) / n_eff),
        live[john.indices],
    )
    reduced = caratheodory.reduce(dec, residual_budget=max(1e-9, gap_tol))
    order = np.argsort(reduced.indices)
    indices = reduced.indices[order]
    weights = reduced.weights[order]
    Yx = Z[indices] @ john.frame
    residual = float(np.linalg.norm((Yx.T * weights) @ Yx - np.eye(n_eff) / n_eff))
    return Sketch(
        source=B,
        k=k,
        indices=indices,
        factor_bound=factor_bound(d, k),
        cardinality_bound=cardinality_bound(d, k),
        john_residual=residual,
        effective_dim=n_eff,
        gap_tol=gap_tol,
        john=JohnDecomposition(indices, weights, john.frame, residual),
        basis=basis,
    )


def sample_directions(n_dirs, d, seed):
    """Uniform directions on the unit sphere (normalized standard normals)."""
    rng = np.random.default_rng(seed)
    Y = rng.standard_normal((n_dirs, d))
    norms = np.linalg.norm(Y, axis=1)
    return Y / norms[:, None]


def direction_ratios(points, subset, directions, batch=8192):
    """Per direction ``max_B |<y,x>| / max_X |<y,x>|`` with 0/0 taken as 1."""
    P = np.asarray(points, dtype=np.float64)
    S = np.asarray(subset, dtype=np.float64)
    out = np.empty(len(directions))
    for start in range(0, len(directions), batch):
        Yb = directions[start : start + batch]
        top_b = np.max(np.abs(P @ Yb.T), axis=0)
        top_x = np.max(np.abs(S @ Yb.T), axis=0)
        bad = (top_x == 0) & (top_b > 0)
        if bad.any():
            j = start + int(np.flatnonzero(bad)[0])
            raise DivisionDegenerate(f"direction {j} vanishes on the sketch but not on the body")
        ratio = np.ones(len(Yb))
        nz = top_x > 0
        ratio[nz] = top_b[nz] / top_x[nz]
        out[start : start + len(Yb)] = ratio
    return out


def verify_sketch(B, sketch, n_dirs=10_000, seed=0):
    """Monte-Carlo check of the certified factor over seeded random directions."""
    if not isinstance(B, PointSet):
        B = PointSet(B)
    D = lift_dim(B.dim, sketch.k)
    threshold = sketch.factor_bound * (1.0 + 20.0 * sketch.gap_tol * D)
    if n_dirs <= 0:
        return SketchReport(1.0, np.zeros(B.dim), True, threshold, 0, seed)
    dirs = sample_directions(n_dirs, B.dim, seed)
    ratios = direction_ratios(B.points, B.points[sketch.indices], dirs)
    j = int(np.argmax(ratios))
    worst = float(ratios[j])
    return SketchReport(worst, dirs[j], bool(worst <= threshold), threshold, n_dirs, seed)

