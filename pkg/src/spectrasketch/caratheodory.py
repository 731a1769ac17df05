"""Support reduction of convex decompositions (Caratheodory's theorem)."""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalBreakdown
from .linalg import kernel_vector, svec


@dataclass(frozen=True)
class WeightedDecomposition:
    """``sum_i weights[i] * vectors[i] == target`` with weights on the simplex.

    ``indices`` label the rows of ``vectors`` (defaults to ``0..s-1``) and are
    carried through reductions so callers can map back to their own points.
    """

    vectors: np.ndarray
    weights: np.ndarray
    target: np.ndarray
    indices: np.ndarray = None

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.vectors, dtype=np.float64))
        object.__setattr__(self, "vectors", V)
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))
        object.__setattr__(self, "target", np.asarray(self.target, dtype=np.float64))
        idx = np.arange(len(V)) if self.indices is None else np.asarray(self.indices, dtype=np.int64)
        object.__setattr__(self, "indices", idx)

    @property
    def support(self):
        return len(self.weights)

    def residuals(self):
        """(max-norm error of the weighted sum, error of the weight total)."""
        combo = self.weights @ self.vectors
        return float(np.max(np.abs(combo - self.target), initial=0.0)), float(abs(self.weights.sum() - 1.0))


def flatten_outer_products(Y):
    """Rows ``svec(y y^T)`` for each row ``y`` of ``Y``."""
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    return svec(Y[:, :, None] * Y[:, None, :])


def _merge_duplicates(dec):
    V, w, idx = dec.vectors, dec.weights, dec.indices
    _, first, inverse = np.unique(V, axis=0, return_index=True, return_inverse=True)
    if len(first) == len(V):
        return dec
    inverse = np.asarray(inverse).ravel()
    keep = np.sort(first)
    merged = np.zeros(len(V))
    np.add.at(merged, first[inverse], w)
    return WeightedDecomposition(V[keep], merged[keep], dec.target, idx[keep])


def reduce(dec, residual_budget=1e-9):
    """Shrink the support to at most ``n + 1`` vectors (``n`` = vector length).

    A decomposition already within the bound is returned unchanged.
    Otherwise exact duplicate vectors are merged first (weights summed onto
    the lower index), and while the support is too large a kernel vector ``lam`` of
    the stacked ``[m_i; 1]`` columns moves the weights along ``-t * lam``
    until the first weight hits zero; that vector is dropped.  The sign is
    the one needing the smaller step, ties drop the lowest index.
    """
    n = dec.vectors.shape[1]
    if dec.support <= n + 1:
        return dec
    dec = _merge_duplicates(dec)
    V, w, idx = dec.vectors, dec.weights.copy(), dec.indices
    alive = list(range(len(w)))
    while len(alive) > n + 1:
        # any n + 2 columns of an (n + 1)-row system are dependent
        cols = alive[: n + 2]
        system = np.vstack([V[cols].T, np.ones(len(cols))])
        lam = kernel_vector(system)
        if lam is None:
            partial = WeightedDecomposition(V[alive], w[alive], dec.target, idx[alive])
            raise NumericalBreakdown("no dependence found among n + 2 columns", payload=partial)
        wc = w[cols]
        best = None
        for sign in (1.0, -1.0):
            direction = sign * lam
            pos = direction > 0
            if not pos.any():
                continue
            ratios = np.full(len(cols), np.inf)
            ratios[pos] = wc[pos] / direction[pos]
            t = ratios.min()
            hit = int(np.flatnonzero(ratios == t)[0])
            if best is None or t < best[0]:
                best = (t, direction, hit)
        t, direction, hit = best
        wc = wc - t * direction
        wc[hit] = 0.0
        np.clip(wc, 0.0, None, out=wc)
        w[cols] = wc
        alive.remove(cols[hit])
    out = WeightedDecomposition(V[alive], w[alive], dec.target, idx[alive])
    before = dec.residuals()
    after = out.residuals()
    if after[0] > before[0] + residual_budget or after[1] > before[1] + residual_budget:
        raise NumericalBreakdown(
            f"reduction drifted: residuals {after} exceed {before} by more than {residual_budget:g}",
            payload=out,
        )
    return out
