"""Builds the optional compiled popcount kernel.

The package works without it (a NumPy fallback is selected at import);
the extension is marked optional so a missing C toolchain does not
break installation.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "commnorm._kernels._gram",
                sources=["src/commnorm/_kernels/_gram.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
