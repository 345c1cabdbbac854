"""Build script: compiles the optional eigenvalue kernel when the toolchain allows.

The package is fully functional without the extension (a batched-numpy
fallback is selected at import); ``Extension(optional=True)`` keeps installs
working on machines with no compiler or no Cython.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "usdpovm._kernels._native",
                ["src/usdpovm/_kernels/_native.pyx"],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
