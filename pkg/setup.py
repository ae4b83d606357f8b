"""Build script: compiles the optional covariance-fill extension.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so a failing C build must not abort installation.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: building the compiled core failed ({exc}); "
            "gpsurf will use its pure-NumPy fallback.",
            file=sys.stderr,
        )


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(
            f"WARNING: {exc}; skipping the compiled core, "
            "gpsurf will use its pure-NumPy fallback.",
            file=sys.stderr,
        )
        return []
    ext = Extension(
        "gpsurf._core._fillcore",
        sources=["src/gpsurf/_core/_fillcore.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=_extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
