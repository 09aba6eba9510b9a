import os

from setuptools import setup

ext_modules = []
if os.environ.get("SUBMINE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/submine/kernels/_fastpath.pyx"],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
            },
        )
    except ImportError:
        # No Cython available: install pure-python only, the kernels
        # package falls back at import time.
        ext_modules = []

setup(ext_modules=ext_modules)
