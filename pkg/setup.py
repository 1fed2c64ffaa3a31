"""Build script: compiles the log-space series kernels as a C extension.

The compiled kernel is optional at runtime; if the extension is missing the
package falls back to the pure-Python twin in crosscav._kernels.series_py.
Set CROSSCAV_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CROSSCAV_NO_EXT") != "1":
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "crosscav._kernels._series_cy",
                ["src/crosscav/_kernels/_series_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
