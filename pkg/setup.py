"""Build script: compiles the optional GF(2) reduction kernel.

The package works without the extension (a pure-Python kernel is selected at
import time), so the build degrades gracefully when Cython is unavailable.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        ["src/lchkit/_reduce_c.pyx"],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
