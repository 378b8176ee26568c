"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that tolerates a missing or broken C toolchain."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            warnings.warn(f"skipping C kernels, using pure-Python fallback: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            warnings.warn(f"skipping {ext.name}, using pure-Python fallback: {exc}")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available, using pure-Python kernels")
        return []
    return cythonize(
        [
            Extension(
                "gaplog._kernels._ckernels",
                ["src/gaplog/_kernels/_ckernels.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
