"""Symmetric tensor powers in compressed coordinates.

The k-th symmetric power of R^d is stored with one coordinate per degree-k
multi-index ``alpha``; that coordinate of the lift of ``x`` is
``sqrt(k! / prod(alpha_i!)) * prod(x_i ** alpha_i)``.  With these weights

    <sym_lift(x, k), sym_lift(y, k)> == <x, y> ** k

exactly, as for the full d**k-entry tensor ``x (x) ... (x) x``.

Multi-indices are listed in graded reverse-lexicographic order: within a
fixed degree, ``alpha`` precedes ``beta`` when the last nonzero entry of
``alpha - beta`` is negative.  For d=3, k=2 this gives
x1^2, x1 x2, x2^2, x1 x3, x2 x3, x3^2.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from . import kernels
from .errors import SizingError

INDEX_MAX = 2**63 - 1


@dataclass(frozen=True)
class MultiIndex:
    exponents: tuple

    @property
    def degree(self):
        return sum(self.exponents)

    def __len__(self):
        return len(self.exponents)

    def multinomial(self):
        out = math.factorial(self.degree)
        for e in self.exponents:
            out //= math.factorial(e)
        return out


@dataclass(frozen=True)
class SymLiftVector:
    d: int
    k: int
    coords: np.ndarray

    def __len__(self):
        return len(self.coords)

    def inner(self, other):
        return float(self.coords @ other.coords)


def lift_dim(d, k):
    """Dimension C(d+k-1, k) of the k-th symmetric power of R^d."""
    if d < 1 or k < 0:
        raise ValueError("need d >= 1 and k >= 0")
    # multiplicative formula; each prefix is itself a binomial, so exact
    out = 1
    for i in range(1, k + 1):
        out = out * (d - 1 + i) // i
        if out > INDEX_MAX:
            raise SizingError(f"binomial C({d + k - 1}, {k}) exceeds the 64-bit index range")
    return out


def binomial(n, k):
    """C(n, k) with the same overflow check as :func:`lift_dim`."""
    if k < 0 or n < k:
        return 0
    if k == 0:
        return 1
    return lift_dim(n - k + 1, k)


@lru_cache(maxsize=256)
def _multi_index_table(d, k):
    lift_dim(d, k)

    def compositions(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    alphas = sorted(compositions(k, d), key=lambda a: a[::-1])
    exps = np.array(alphas, dtype=np.int64).reshape(len(alphas), d)
    coef = np.array([math.sqrt(MultiIndex(a).multinomial()) for a in alphas])
    exps.setflags(write=False)
    coef.setflags(write=False)
    return tuple(alphas), exps, coef


def enumerate_multi_indices(d, k):
    """All degree-k multi-indices in d variables, graded reverse-lex order."""
    if d < 1 or k < 1:
        raise ValueError("need d >= 1 and k >= 1")
    return [MultiIndex(a) for a in _multi_index_table(d, k)[0]]


def sym_lift_matrix(points, k):
    """Row-wise symmetric lift of an (n, d) array; returns (n, C(d+k-1, k))."""
    X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n, d = X.shape
    if k == 0:
        return np.ones((n, 1))
    _, exps, coef = _multi_index_table(d, k)
    return kernels.monomial_lift(X, exps, coef)


def sym_lift(x, k):
    x = np.asarray(x, dtype=np.float64).ravel()
    if k < 1:
        raise ValueError("k must be positive")
    return SymLiftVector(len(x), k, sym_lift_matrix(x[None, :], k)[0])
