"""Build the optional compiled kernels.

The package works without them (a numpy fallback is selected at import time),
so a missing compiler or Cython only costs speed, never a failed install.
"""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("rclab._kernels._speedups", ["src/rclab/_kernels/_speedups.pyx"])],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
