"""Build script: compiles the optional simplex pivot kernel.

The extension is a pure speedup; if Cython or a C compiler is unavailable the
install proceeds and lmpcirc falls back to the numpy kernel at import time.
`-ffp-contract=off` keeps the compiled pivot arithmetic bit-identical to the
numpy fallback (no fused multiply-add).
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain-dependent
            print(f"warning: skipping compiled kernel ({exc}); using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain-dependent
            print(f"warning: could not build {ext.name} ({exc}); using numpy fallback")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - cython missing at build time
        return []
    ext = Extension(
        "lmpcirc._kernels._simplex_cy",
        ["src/lmpcirc/_kernels/_simplex_cy.pyx"],
        extra_compile_args=["-O2", "-ffp-contract=off"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(cmdclass={"build_ext": OptionalBuildExt}, ext_modules=extensions())
