import os

import numpy as np
from setuptools import Extension, setup

# The compiled kernels are optional: girgmotif falls back to pure Python when
# the extension is missing, so a failed build must not abort installation.
try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("GIRGMOTIF_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "girgmotif._ckernels",
                ["src/girgmotif/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
