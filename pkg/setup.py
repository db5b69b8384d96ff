"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-NumPy fallback is selected
at import time); set SPECKLEDIST_SKIP_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import setup

import sys

ext_modules = []
if os.environ.get("SPECKLEDIST_SKIP_EXT", "0") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        # -ffast-math lets gcc route exp/sin/cos through libmvec (hence the
        # explicit link); the kernels keep inf/nan out of fast-math arithmetic
        if sys.platform == "win32":
            compile_args, link_args = [], []
        else:
            compile_args = ["-O3", "-ffast-math"]
            link_args = ["-lmvec", "-lm"] if sys.platform.startswith("linux") else []
        ext_modules = cythonize(
            [
                Extension(
                    "speckledist._kernels._core",
                    ["src/speckledist/_kernels/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=compile_args,
                    extra_link_args=link_args,
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
