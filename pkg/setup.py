"""Build script for the optional compiled simulation kernels.

The package works without the extension: leakmeter._kernels falls back to
the pure-Python implementation when leakmeter._speedups is not importable.
Build failures (missing compiler, missing Cython) therefore only cost speed.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Tolerate extension build failures; the pure-Python kernels take over."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"warning: compiled kernels not built ({exc}); "
            "leakmeter will use the pure-Python fallback",
            file=sys.stderr,
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print(
            "warning: Cython not available; skipping compiled kernels",
            file=sys.stderr,
        )
        return []
    return cythonize(
        [
            Extension(
                "leakmeter._speedups",
                ["src/leakmeter/_speedups.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
