import os

from setuptools import setup

ext_modules = []
if os.environ.get("BGRW_NO_EXT") != "1":
    # The compiled kernel lane is optional: the package falls back to the
    # pure-Python twin when the extension is absent (see bgrw._backend).
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/bgrw/_ckernels.pyx"],
        language_level=3,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
