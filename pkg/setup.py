from setuptools import setup, Extension
from Cython.Build import cythonize

# -ffp-contract=off keeps the compiled engine bit-identical to the pure-Python
# fallback (no fused multiply-adds that libm-based Python code cannot produce).
ext = Extension(
    "dsycascade._engine",
    ["src/dsycascade/_engine.pyx"],
    extra_compile_args=["-O2", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext], language_level=3))
