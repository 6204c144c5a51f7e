"""CMake-driven build for the `newslabel._core` pybind11 extension."""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        out_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        build_temp = Path(self.build_temp).resolve()
        build_temp.mkdir(parents=True, exist_ok=True)

        source_dir = Path(__file__).parent.resolve()
        cmake_args = [
            f"-DNEWSLABEL_PY_OUTPUT_DIR={out_dir}",
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DCMAKE_BUILD_TYPE=Release",
            "-DNEWSLABEL_BUILD_TESTS=OFF",
            "-DNEWSLABEL_BUILD_PYTHON=ON",
        ]
        subprocess.run(["cmake", str(source_dir), *cmake_args], cwd=build_temp, check=True)
        subprocess.run(
            ["cmake", "--build", ".", "--target", "newslabel_pymodule",
             "-j", str(os.cpu_count() or 2)],
            cwd=build_temp,
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("newslabel._core")],
    cmdclass={"build_ext": CMakeBuild},
)
