#!/usr/bin/env python

"""
Call `pip install -e .` to install package locally for testing.
"""

from setuptools import setup, find_packages

# build command
setup(
    name="surfsim",
    version="0.1.0",
    license="GPLv3",
    description="Surface CRN simulation, cross-model compilation and bounded simulation checks",
    packages=find_packages(exclude=["tests"]),
    install_requires=["pandas", "numpy", "toyplot", "loguru", "networkx"],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["surfsim=surfsim.__main__:main"]},
    classifiers=["Programming Language :: Python :: 3"],
)
