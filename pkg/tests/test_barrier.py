import numpy as np
import pytest

from spectrasketch.barrier import barrier_maximize, null_space
from spectrasketch.linalg import svec


def test_null_space():
    A = np.array([[1.0, 1.0, 0.0]])
    N = null_space(A)
    assert N.shape == (3, 2)
    np.testing.assert_allclose(A @ N, 0, atol=1e-14)
    assert null_space(np.zeros((0, 2))).shape == (2, 2)


def test_trace_one_max_entry():
    # max Y_11 over 2x2 psd Y with trace 1: optimum 1
    A = np.array([[1.0, 0.0, 1.0]])
    c = np.array([1.0, 0.0, 0.0])
    xi0 = svec(np.eye(2) / 2)
    res = barrier_maximize(A, [1.0], c, 0, 2, xi0, tol=1e-9)
    assert res.status == "optimal"
    assert res.value == pytest.approx(1.0, abs=1e-8)


def test_free_variable_tied_to_block():
    # max z subject to z + Y = 1, Y >= 0 (1x1): optimum 1
    A = np.array([[1.0, 1.0]])
    res = barrier_maximize(A, [1.0], np.array([1.0, 0.0]), 1, 1, np.array([0.0, 1.0]), tol=1e-9)
    assert res.value == pytest.approx(1.0, abs=1e-8)


def test_unbounded_ray():
    # max Y over 1x1 psd Y without constraints
    res = barrier_maximize(np.zeros((0, 1)), [], np.array([1.0]), 0, 1, np.array([1.0]))
    assert res.status == "unbounded"


def test_unbounded_flat_direction():
    # z never meets the psd block: any positive objective on it is unbounded
    res = barrier_maximize(np.zeros((0, 2)), [], np.array([1.0, 0.0]), 1, 1, np.array([0.0, 1.0]))
    assert res.status == "unbounded" and res.iterations == 0


def test_start_must_be_interior():
    with pytest.raises(ValueError):
        barrier_maximize(np.zeros((0, 1)), [], np.array([1.0]), 0, 1, np.array([-1.0]))
