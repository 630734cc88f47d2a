import os

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:  # pure-Python install
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("optensor.kernels._ckernels", ["src/optensor/kernels/_ckernels.pyx"],
                   include_dirs=[np.get_include()], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    ) if not os.environ.get("OPTENSOR_PURE") else []

setup(ext_modules=ext_modules)
