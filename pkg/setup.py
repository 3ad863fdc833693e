"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile only costs speed, not functionality.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/alpipe/kernels/_ckernels.pyx",
        language_level="3",
    )
    include_dirs = [numpy.get_include()]
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"alpipe: skipping Cython extension build ({exc})")
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
