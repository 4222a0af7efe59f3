"""Builds the optional compiled kernel; the package works without it."""

import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("LNSFP8_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("lnsfp8.kernels._kernels", ["src/lnsfp8/kernels/_kernels.pyx"])],
            compiler_directives={"language_level": "3"},
        )
        for ext in ext_modules:
            ext.include_dirs.append(np.get_include())

setup(ext_modules=ext_modules)
