"""Build script: compiles the optional Langevin stepping kernel.

The package works without the extension (a vectorized NumPy fallback is
selected at import time).  Set TWOPHOTON_NO_EXT=1 to skip compilation.
"""
import os

from setuptools import Extension, setup

extensions = []
if not os.environ.get("TWOPHOTON_NO_EXT"):
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "twophoton._kernels_cy",
        sources=["src/twophoton/_kernels_cy.pyx"],
        include_dirs=[numpy.get_include()],
        # -ffp-contract=off keeps the compiled kernel bit-identical to the
        # NumPy fallback (no fused multiply-add contraction).
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    extensions = cythonize([ext], language_level=3)

setup(ext_modules=extensions)
