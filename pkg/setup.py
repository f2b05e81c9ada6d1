"""Build script for the optional compiled kernels.

The Cython extension is skipped when Cython or a C compiler is unavailable;
``cavityqc.kernels`` then falls back to the numpy implementation.
"""

import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CAVITYQC_NO_EXT", "0") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "cavityqc.kernels._ckernels",
                    ["src/cavityqc/kernels/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
