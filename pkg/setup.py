"""Builds the optional Cython tableau kernel; the package works without it."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SIMSMOOTH_NO_EXT", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "simsmooth._core._tableau",
                    ["src/simsmooth/_core/_tableau.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )

setup(ext_modules=ext_modules)
