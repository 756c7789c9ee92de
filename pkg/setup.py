"""Builds the optional compiled kernel for Q-network training.

The package works without the extension: dialogsim.rl.backend falls back to
the numpy implementation when the compiled module is absent. Set
DIALOGSIM_NO_EXT=1 to skip compilation explicitly.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("DIALOGSIM_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "dialogsim.rl._qnetc",
                    ["src/dialogsim/rl/_qnetc.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "language_level": "3",
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
