"""Kernel backend selection.

The compiled ``_core`` extension is used when it was built; otherwise the
numpy fallback is used.  ``use_backend`` switches explicitly, which the
tests and the benchmark use to compare the two.
"""

from . import _fallback

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

_impl = _core if _core is not None else _fallback
BACKEND = "cython" if _core is not None else "python"


def available_backends():
    return ["cython", "python"] if _core is not None else ["python"]


def use_backend(name):
    """Select ``"cython"`` or ``"python"`` kernels; returns the previous name."""
    global _impl, BACKEND
    if name == "cython":
        if _core is None:
            raise ImportError("compiled kernels are not built")
        impl = _core
    elif name == "python":
        impl = _fallback
    else:
        raise ValueError(f"unknown backend {name!r}")
    previous = BACKEND
    _impl, BACKEND = impl, name
    return previous


def jacobi_eigh(a, tol=1e-15, max_sweeps=100):
    return _impl.jacobi_eigh(a, tol, max_sweeps)


def monomial_lift(x, exps, coef):
    return _impl.monomial_lift(x, exps, coef)


def fw_steps(X, u, Linv, g, max_steps, gap_tol):
    return _impl.fw_steps(X, u, Linv, g, int(max_steps), float(gap_tol))
