"""Build script for the optional compiled Gibbs kernel.

The package is fully functional without the extension: legaltopics._kernels
falls back to the pure-Python twin at import time. Compilation is attempted
when Cython and a C compiler are available and silently skipped otherwise.

-ffp-contract=off keeps the C kernel's floating-point arithmetic identical
to the pure-Python twin (no fused multiply-add), which the backend
equivalence tests rely on.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or broken toolchain
            print(f"warning: compiled kernel skipped ({exc}); pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); pure-Python fallback will be used")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "legaltopics._gibbs_cy",
                ["src/legaltopics/_gibbs_cy.pyx"],
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
