"""Builds the optional compiled jet kernel; the package works without it."""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("isocurve._jetkernel", ["src/isocurve/_jetkernel.pyx"],
                   extra_compile_args=["-O3"], optional=True)],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
