from setuptools import setup

setup(
    name='balmod',
    version='0.1',
    packages=['balmodlib'],
    scripts=['balmod.py'],
    license='GPLv3',
    description='Balanced modulation for storage channels: codecs, read thresholds and simulations.',
    install_requires=[
        'numpy',
        'scipy',
        'matplotlib',
    ],
    extras_require={
        'test': ['pytest', 'hypothesis'],
    },
)
