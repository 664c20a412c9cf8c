import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

HERE = os.path.dirname(os.path.abspath(__file__))


def eigen_include():
    for candidate in ("/usr/include/eigen3", "/usr/local/include/eigen3"):
        if os.path.isdir(candidate):
            return candidate
    raise RuntimeError("Eigen3 headers not found; install libeigen3-dev")


core_sources = [
    "src/operator_basis.cpp",
    "src/mub.cpp",
    "src/channel.cpp",
    "src/fidelity.cpp",
    "src/relevance.cpp",
    "src/estimator.cpp",
    "src/io.cpp",
    "src/cli.cpp",
]

ext = Pybind11Extension(
    "_quditmc",
    sources=["bindings/module.cpp"] + core_sources,
    include_dirs=[
        os.path.join(HERE, "include"),
        os.path.join(HERE, "vendor"),
        eigen_include(),
    ],
    cxx_std=20,
)

setup(
    packages=["quditmc"],
    package_dir={"quditmc": "python/quditmc"},
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
)
