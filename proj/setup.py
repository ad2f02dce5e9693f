import glob

from pybind11.setup_helpers import ParallelCompile, Pybind11Extension, build_ext
from setuptools import setup

ParallelCompile("NPY_NUM_BUILD_JOBS", default=4).install()

ext = Pybind11Extension(
    "lfir._core",
    sorted(glob.glob("src/*.cpp")) + ["bindings/module.cpp"],
    include_dirs=["include"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
