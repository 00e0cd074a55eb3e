"""Setup for the hydrolfc package."""

# !/usr/bin/env python
# -*- coding: utf-8 -*-

import os

import setuptools


TEST_REQUIRES = [
    # testing and coverage
    'pytest', 'coverage', 'pytest-cov',
    # to be able to run `python setup.py checkdocs`
    'collective.checkdocs', 'pygments',
]

with open('README.rst') as f:
    README = f.read()

VERSION = {}
with open(os.path.join('hydrolfc', '_version.py')) as f:
    exec(f.read(), VERSION)  # pylint: disable=W0122

setuptools.setup(
    name='hydrolfc',
    description=(
        'Load-frequency control experiments for islanded small hydro '
        'plants'),
    version=VERSION['__version__'],
    long_description=README,
    packages=setuptools.find_packages(exclude=['tests']),
    include_package_data=True,
    entry_points='''
    [console_scripts]
        hydrolfc=hydrolfc.scripts.hydrolfc_cli:cli
    ''',
    python_requires=">=3.8",
    install_requires=[
        'numpy', 'pandas>=1.5', 'prettytable', 'strct>=0.0.14',
        'comath>=0.0.3', 'birch', 'click', 'pyyaml', 'matplotlib',
    ],
    extras_require={
        'test': TEST_REQUIRES,
    },
    platforms=['any'],
    keywords='hydro load-frequency-control fuzzy genetic-algorithm',
    classifiers=[
        # Trove classifiers
        # (https://pypi.python.org/pypi?%3Aaction=list_classifiers)
        'Development Status :: 4 - Beta',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering',
        'Intended Audience :: Science/Research',
    ],
)
