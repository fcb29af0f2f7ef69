"""Build the optional Cython edit-distance kernel.

The package works without it (a pure-Python fallback is selected at
import time), so a failed compile only costs speed.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("lettot._editdist", ["src/lettot/_editdist.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
