"""Build hook for the optional compiled kernels.

The package works without a C compiler or Cython; in that case the
pure-Python kernels are used at import time.
"""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:
    pass
else:
    ext_modules = cythonize(
        [
            Extension(
                "dcmpoles.exact._ckernels",
                ["src/dcmpoles/exact/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
