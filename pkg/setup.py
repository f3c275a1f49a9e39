"""
Respec - Copyright (C) 2026 the respec developers

    This program is free software: you can redistribute it and/or modify
    it under the terms of the GNU General Public License as published by
    the Free Software Foundation, either version 3 of the License, or
    (at your option) any later version.

    This program is distributed in the hope that it will be useful,
    but WITHOUT ANY WARRANTY; without even the implied warranty of
    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
    GNU General Public License for more details.

    You should have received a copy of the GNU General Public License
    along with this program.  If not, see <https://www.gnu.org/licenses/>
"""
from setuptools import setup, find_packages

from respec.respec import RESPEC_VERSION

setup(

    # Package info
    name='respec',
    version=RESPEC_VERSION,
    author="the respec developers",
    license='GPLv3+',
    description="Spectral convergence lab for the Laplacian with small Neumann resonators",
    long_description=open('README.md').read(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    python_requires='>=3.9',
    zip_safe=False,
    # Dependencies
    install_requires=[
        'numpy>=1.22', 'scipy>=1.12', 'pyamg>=5.0', 'matplotlib>=3.5'
    ],
    extras_require={'test': ['pytest>=7']},
    # Script info
    entry_points={'console_scripts':
        [
            'respec = respec.respec:main',
        ]},
    classifiers=[
        "Development Status :: 4 - Beta",
        "Programming Language :: Python :: 3",
        "LICENSE :: OSI APPROVED :: GNU GENERAL PUBLIC LICENSE V3 OR LATER (GPLV3+)",
        "Operating System :: OS Independent",
        "Intended Audience :: Science/Research",
        "Intended Audience :: Education",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics"
    ]
)
