from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "geoweb._jetcore",
        ["src/geoweb/_jetcore.pyx"],
        # -ffp-contract=off keeps the compiled kernels bit-identical to the
        # pure-Python backend (no fused multiply-add)
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]


class OptionalBuildExt(build_ext):
    """Build the compiled jet kernels when possible, warn and continue when not."""

    def run(self):
        try:
            super().run()
        except (PlatformError, FileNotFoundError):
            self._skip()

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except (CCompilerError, ExecError, PlatformError):
            self._skip()

    @staticmethod
    def _skip():
        print("WARNING: compiled jet kernels unavailable; "
              "the pure-Python backend will be used")


if cythonize is not None:
    ext_modules = cythonize(extensions,
                            compiler_directives={"language_level": "3"})
else:
    ext_modules = []
    print("WARNING: Cython not found; building without compiled jet kernels")

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
