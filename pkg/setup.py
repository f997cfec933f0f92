from setuptools import setup, find_packages

# ---------- Setup  ------------------------------------------------------------------------------------------

import os
this_directory = os.path.abspath(os.path.dirname(__file__))
try:
    with open(os.path.join(this_directory, 'requirements.txt'), 'r') as fh:
        requirements = fh.read().strip().split()
    with open(os.path.join(this_directory, 'README.md'), encoding='utf-8') as f:
        __doc__ = f.read()
except Exception:  # weird file
    requirements = ['numpy', 'scipy', 'pandas', 'plotly', 'numba', 'pyyaml']
    __doc__ = ''

description = 'Mesh-free Lagrangian simulation of multi-group pedestrian flow coupled to a non-local SEIS contagion model.'

setup(
    name='crowd_contagion',
    version='0.1.0',
    python_requires='>=3.8',
    packages=find_packages(exclude=['tests', 'examples', 'examples.*']),
    package_data={'crowd_contagion.scenario': ['presets/*.yaml']},
    install_requires=requirements,
    extras_require={'test': ['pytest'], 'png': ['kaleido']},
    license='MIT',
    classifiers=[ # https://pypi.org/classifiers/
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Physics',
        'Topic :: Scientific/Engineering :: Mathematics',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
    ],
    description=description,
    long_description=__doc__,
    long_description_content_type='text/markdown',
    entry_points={
        'console_scripts': ['crowd-contagion=crowd_contagion.cli:main'],
    }
)
