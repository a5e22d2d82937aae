"""Build the optional Cython kernels for nlslab.

The package works without them; ``nlslab.kernels`` falls back to NumPy
when the extension is missing.
"""
import os

import numpy as np
from setuptools import Extension, setup

extensions = []
if os.environ.get("NLSLAB_NO_EXT", "0") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        extensions = cythonize(
            [
                Extension(
                    "nlslab._ckernels",
                    ["src/nlslab/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=extensions)
