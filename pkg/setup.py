"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a numpy fallback
is selected at import time); the build therefore degrades gracefully
when Cython or a C compiler is unavailable.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "parabound._kernels._fast",
        ["src/parabound/_kernels/_fast.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    pass

setup(ext_modules=ext_modules)
