from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension("mvchain._core", ["src/mvchain/_core.pyx"]),
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    ),
)
