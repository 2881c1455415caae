"""CMake-backed build of the _qjump extension.

The C++ core, tests and CLI live in the CMake project; the wheel only needs
the pybind11 module, so build_ext drives CMake with everything else off and
drops the resulting _qjump library into the qjump package.
"""

import os
import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        import pybind11

        configure = [
            "cmake",
            str(source_dir),
            f"-DCMAKE_BUILD_TYPE={os.environ.get('QJUMP_BUILD_TYPE', 'Release')}",
            "-DQJUMP_BUILD_TESTS=OFF",
            "-DQJUMP_BUILD_CLI=OFF",
            "-DQJUMP_BUILD_PYTHON=ON",
            f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
            f"-DPYTHON_EXECUTABLE={sys.executable}",
        ]
        subprocess.run(configure, cwd=build_dir, check=True)
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_qjump", "-j"],
            cwd=build_dir,
            check=True,
        )

        built = next(build_dir.glob("_qjump*.so"))
        target = Path(self.get_ext_fullpath(ext.name))
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built, target)


setup(
    ext_modules=[CMakeExtension("qjump._qjump")],
    cmdclass={"build_ext": CMakeBuild},
)
