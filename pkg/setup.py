import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# No -ffast-math, no FMA contraction and no sin/cos -> sincos fusion (glibc's
# sincos differs from sin and cos in the last bit): the compiled kernel must
# reproduce the pure-Python fallback bit for bit.
extensions = [
    Extension(
        "kpplab._kernels",
        sources=["src/kpplab/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3", "-ffp-contract=off", "-fno-builtin-sin", "-fno-builtin-cos"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
)
