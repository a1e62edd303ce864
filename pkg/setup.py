from setuptools import find_packages, setup

setup(
    name='loadcoupling',
    version='0.1.0',
    description="""
        Load coupling with joint transmission in heterogeneous cellular \
    networks: fixed-point load models, MILP bounds and link adjustment.
    """,
    author='~nisfeb',
    packages=find_packages(include=[
        'loadcoupling',
        'loadcoupling.*',
    ]),
    python_requires='>=3.10',
    install_requires=[
        'numpy>=1.24',
        'scipy>=1.10',
        'pandas>=2.0',
        'python-dotenv>=1.0.0',
    ],
    extras_require={
        'dev': ['pytest>=4.4.1', 'pytest-runner'],
    },
    entry_points={
        'console_scripts': [
            'loadcoupling=loadcoupling.bench.main:main',
        ],
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python :: 3',
        'License :: OSI Approved :: MIT License',
    ],
)
