"""Build the optional compiled grid sweep; fall back silently when Cython or a compiler is missing."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("REPEATERGATES_PURE", "") not in ("1", "true", "yes"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("repeatergates._kernels", ["src/repeatergates/_kernels.pyx"],
                       include_dirs=[numpy.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
