import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "cybe_forge._kernels_c",
                ["src/cybe_forge/_kernels_c.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - fallback path
    sys.stderr.write("cybe-forge: building without compiled kernels (%s)\n" % exc)

setup(ext_modules=ext_modules)
