"""Builds the optional compiled kernel; a pure-Python fallback ships alongside.

Package metadata lives in pyproject.toml; the layout is repeated here so
legacy setup.py code paths (old pip editable installs) still work.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("cig._core", ["src/cig/_core.pyx"], optional=True)],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython at build time: install pure-Python only.
    extensions = []

setup(
    name="cig",
    package_dir={"": "src"},
    packages=["cig"],
    ext_modules=extensions,
)
