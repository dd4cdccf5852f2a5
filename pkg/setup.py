import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "siegelfx._kernels",
        ["src/siegelfx/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        # a failed compile leaves the numpy fallback in charge
        optional=True,
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
