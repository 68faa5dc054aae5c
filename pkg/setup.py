"""
Setup script for marginal-pgm.
"""
import os
from setuptools import setup, find_packages

def read(fname):
    """Read the contents of a file."""
    with open(os.path.join(os.path.dirname(__file__), fname), encoding='utf-8') as f:
        return f.read()

setup(
    name="marginal-pgm",
    version="1.0.0",
    description="Estimate discrete distributions from noisy private marginal measurements "
                "with graphical models, and answer queries without the full table.",
    long_description=read('README.md'),
    long_description_content_type="text/markdown",
    packages=find_packages(include=['marginal_pgm', 'marginal_pgm.*']),
    install_requires=[
        'numpy>=1.23',
        'scipy>=1.9',
        'networkx>=2.8',
        'pandas>=1.5',
        'python-dotenv>=1.0.0',
    ],
    extras_require={
        'dev': [
            'pytest>=7.0.0',
            'black>=22.0.0',
            'flake8>=4.0.0',
        ],
    },
    python_requires='>=3.9',
    entry_points={
        'console_scripts': [
            'marginal-pgm=marginal_pgm.cli:main',
        ],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    keywords='differential-privacy graphical-models junction-tree synthetic-data',
)
