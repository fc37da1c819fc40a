import os

from setuptools import setup

ext_modules = []
if os.environ.get("DUALCAVITY_NO_EXT", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        print("Cython/numpy unavailable at build time; installing the pure-Python fallback only")
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "dualcavity._kernels",
                    ["src/dualcavity/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
