"""Build script: compiles the optional Cython solver core.

The package works without the extension (a numpy fallback is selected at
import time), so any failure to build it is downgraded to a warning.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "klsolve._kernels",
                ["src/klsolve/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(
        "klsolve: compiled core unavailable (%s); installing pure-python backend only\n" % exc
    )

setup(ext_modules=ext_modules)
