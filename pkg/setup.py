"""Builds the optional compiled kernels; all metadata lives in pyproject.toml.

The package works without the extension (a pure NumPy fallback is selected
at import time), so a missing Cython toolchain only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    # -ffp-contract=off keeps float results bit-identical to the NumPy
    # fallback (no FMA contraction), which the parity tests rely on.
    ext_modules = cythonize(
        [
            Extension(
                "gridspect.kernels._ckernels",
                ["src/gridspect/kernels/_ckernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
