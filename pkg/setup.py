import os

from setuptools import Extension, setup


def extensions():
    # ISOCLOUDS_NO_EXT=1 builds a pure-Python install (the runtime falls back automatically).
    if os.environ.get("ISOCLOUDS_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "isoclouds._ckernels",
        ["src/isoclouds/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions())
