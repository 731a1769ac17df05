"""Certified small sketches, spectrahedral lifts and low psd-rank approximation."""

from .errors import SpectraSketchError
from .kernels import BACKEND, available_backends, use_backend
from .lift import (
    DirectionSet,
    SlackMatrix,
    SpectrahedralLift,
    build_lift,
    build_slack_matrix,
    certify_exactness,
    enumerate_directions,
    maximize_over_lift,
)
from .mvee import (
    CenteredEllipsoid,
    JohnDecomposition,
    extract_john_decomposition,
    mvee_centered,
    verify_john,
)
from .psdrank import (
    Polynomial,
    PsdFactorization,
    RankFactorization,
    approx_low_psd_rank,
    psd_factorize_few_values,
    sqrt_uniform_approx,
    verify_psd_factorization,
)
from .sketch import PointSet, Sketch, build_sketch, verify_sketch
from .tensor import MultiIndex, SymLiftVector, enumerate_multi_indices, lift_dim, sym_lift

__version__ = "0.1.0"
