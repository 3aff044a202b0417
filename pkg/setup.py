#!/usr/bin/env python
# -*- coding: utf-8

from setuptools import setup, find_packages

NAME = "qfpi"
VERSION = "9999"

setup(name=NAME,
    version=VERSION,
    license="CeCILL",
    classifiers=[
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    keywords='waveguide QED, Fabry-Perot, optical diode, two-level system',
    description="Self-consistent Fabry-Perot model of two saturable emitters in a waveguide",
    long_description=open('README.md').read(),
    long_description_content_type="text/markdown",
    install_requires=[
        "numpy",
        "scipy",
        "tqdm"
    ],
    entry_points={
        "console_scripts": [
            "qfpi=qfpi.cli:main",
            "qfpi-sweep=qfpi.cli.sweep:main",
        ],
    },
    packages = find_packages(exclude=["tests"]),
)
