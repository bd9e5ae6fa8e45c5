"""Build script: compiles the optional integrator extension.

The package is pure Python except for one hot loop, the adaptive
Runge-Kutta kernel in ``emaflow.spectral._kernels``.  Sweeps and
bisection searches call it thousands of times, so a compiled version
pays for itself; everything else is NumPy-bound and stays in Python.

Set EMAFLOW_PURE_PYTHON=1 in the environment to skip the extension
entirely (the package falls back to ``_kernels_py`` at import time,
and the same variable forces the fallback even when the extension is
present).
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("EMAFLOW_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "emaflow.spectral._kernels",
                    ["src/emaflow/spectral/_kernels.pyx"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        # No Cython available: install the pure-Python fallback only.
        ext_modules = []

setup(ext_modules=ext_modules)
