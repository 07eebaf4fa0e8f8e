"""Build script for the optional compiled kernels.

The package works without the extension (a pure-NumPy fallback is selected
at import time), so extension build failures are downgraded to warnings.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Skip, rather than fail, when the kernels cannot be compiled."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: building the compiled kernels failed ({exc}); "
            "orbitext will use the pure-NumPy fallback.",
            file=sys.stderr,
        )


try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "orbitext._kernels",
                ["src/orbitext/_kernels.pyx"],
                include_dirs=[np.get_include()],
                # -ffp-contract=off keeps results bitwise equal to the
                # NumPy fallback (no FMA contraction of v + L*d).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
