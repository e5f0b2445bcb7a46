"""Build script: compiles the optional Cython tracking kernel.

The package works without the extension (a pure-Python twin is selected at
import time), so any build failure here downgrades to a source-only install
instead of aborting.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "dmriqc.dwi._tracking_cy",
                ["src/dmriqc/dwi/_tracking_cy.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off keeps float results bit-identical to the
                # pure-Python lane (no FMA contraction).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    sys.stderr.write(f"dmriqc: skipping Cython kernel build ({exc})\n")

setup(ext_modules=ext_modules)
