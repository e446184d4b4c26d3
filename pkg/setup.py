"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension: `inkgen._kernels`
falls back to numpy implementations at import time.  Building here is
therefore best-effort; a failed compile degrades to the pure path with a
warning instead of failing the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    import numpy as np
except ImportError:  # pragma: no cover - numpy is a hard runtime dep anyway
    np = None

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None


class OptionalBuildExt(build_ext):
    """build_ext that downgrades compiler failures to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            warnings.warn(f"compiled kernels skipped ({exc}); using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernels skipped ({exc}); using numpy fallback")


ext_modules = []
if np is not None and cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "inkgen._kernels._ck",
                ["src/inkgen/_kernels/_ck.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
