import glob
import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

here = os.path.dirname(os.path.abspath(__file__))
vendor_candidates = [os.path.join(here, "vendor"), "/opt/vendor"]
vendor = next((d for d in vendor_candidates if os.path.exists(os.path.join(d, "json.hpp"))), None)
include_dirs = [os.path.join(here, "include")]
if vendor is not None:
    include_dirs.append(vendor)

ext = Pybind11Extension(
    "duallane._core",
    sorted(glob.glob("src/*.cpp")) + ["python/bindings.cpp"],
    include_dirs=include_dirs,
    cxx_std=20,
    libraries=["crypto"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
