import numpy as np
from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the pure
# numpy implementations in hoidet.kernels.pure when the extension is
# missing (see hoidet/kernels/__init__.py).
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "hoidet.kernels._speedups",
                ["src/hoidet/kernels/_speedups.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
