import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("ACCELCERT_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "accelcert._core._kernel",
                ["src/accelcert/_core/_kernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
