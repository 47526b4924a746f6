import os

from setuptools import Extension, setup

# The water-filling inner loop is also provided as a compiled kernel.  The
# package works without it (a NumPy fallback is selected at import time), so
# a missing compiler or QSEARCH_NO_EXT=1 simply skips the extension.
ext_modules = []
if os.environ.get("QSEARCH_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "qsearch._kernels._waterfill",
                    ["src/qsearch/_kernels/_waterfill.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
