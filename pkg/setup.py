import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # The package still works without the compiled kernels; the pure
    # numpy backend is selected at import time.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "nkcurv._fast",
                ["src/nkcurv/_fast.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
