import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CONTACTFLOW_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("contactflow._speedups", ["src/contactflow/_speedups.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython available: install the pure-Python package only.
        ext_modules = []

setup(ext_modules=ext_modules)
