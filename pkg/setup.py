"""Build the optional Cython kernels; the package works without them."""
import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("SPECTRASKETCH_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "spectrasketch._core",
                    ["src/spectrasketch/_core.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError as exc:  # pragma: no cover
        print(f"building without compiled kernels: {exc}", file=sys.stderr)

setup(ext_modules=ext_modules)
