import os

from setuptools import Extension, setup

if os.environ.get("SLOTFORGE_NO_EXT"):
    # Pure-Python install; slotforge._kernels falls back to _native at import.
    setup()
else:
    from Cython.Build import cythonize

    setup(
        ext_modules=cythonize(
            [
                Extension(
                    "slotforge._kernels._speedups",
                    ["src/slotforge/_kernels/_speedups.pyx"],
                )
            ],
            language_level="3",
        )
    )
