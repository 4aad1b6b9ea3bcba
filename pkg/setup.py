"""Build script for the compiled simulation kernel.

The package works without the extension (a numpy fallback is selected at
import time), but the compiled kernel is what makes budget-scale runs fast,
so the build is attempted unconditionally.
"""

import os

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

NPYRANDOM_LIB = os.path.join(os.path.dirname(numpy.__file__), "random", "lib")

extensions = [
    Extension(
        "coea_lab._kernel._ckernel",
        ["src/coea_lab/_kernel/_ckernel.pyx"],
        include_dirs=[numpy.get_include()],
        library_dirs=[NPYRANDOM_LIB],
        libraries=["npyrandom"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
