"""Builds the optional compiled assembly kernels.

The extension is marked optional: if no C toolchain (or Cython) is
available the install still succeeds and the package falls back to the
pure-numpy kernels at import time.
"""
import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext = Extension(
        "bucklab._kernels._assembly_cy",
        ["src/bucklab/_kernels/_assembly_cy.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
        optional=True,
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
