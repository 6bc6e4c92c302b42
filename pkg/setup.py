"""
CardTree
--------

Tests whether two groups of card-sorting participants organize the same words into the same
hierarchy, by comparing the dendrograms of their Hamming distance matrices.
"""
from setuptools import find_packages, setup


setup(
    name='CardTree',
    version='0.1.0',
    license='MIT',
    description='Dendrogram equality tests for card-sorting studies',
    long_description=__doc__,
    packages=find_packages(),
    zip_safe=False,
    include_package_data=True,
    platforms='any',
    python_requires='>=3.8',
    install_requires=[
        'numpy',
        'scipy',
        'networkx',
    ],
    entry_points={
        'console_scripts': [
            'cardtree = cardtree.cli:main',
        ],
    },
    classifiers=[
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ]
)
