from setuptools import setup, find_packages

DESCRIPTION = 'Finite-horizon sequential decision problems: backwards induction, viability and brute-force verification'


extras_require = {
    'tester': [
        "pytest>=8,<9",
    ],
    'linter': [
        "pyright",
    ],
    'docs': [
        "sphinx<8",
        "sphinx_rtd_theme>=2.0.0,<3",
    ],
    'dev': [
        "wheel",
        "bumpversion==0.6.0"
    ]
}

extras_require['dev'] = (
    extras_require['tester'] # type: ignore
    + extras_require['linter']
    + extras_require['docs']
    + extras_require['dev']
)

with open('./README.md') as readme:
    long_description = readme.read()

setup(
    name="sdp-kit",
    version="0.1.0", # edit using bumpversion
    description=DESCRIPTION,
    long_description_content_type='text/markdown',
    long_description=long_description,
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    python_requires='>=3.8',
    package_data={'sdpkit': ['py.typed']},
    install_requires=[
        "typing_extensions",
        "pydantic>=2.0.0,<3",
        "hypothesis>=6.80,<7",
    ],
    extras_require=extras_require,
    entry_points={
        'console_scripts': [
            'sdpkit=sdpkit.cli:main',
        ],
    },
    keywords=['dynamic programming', 'backwards induction', 'sequential decision problem', 'viability'],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ]
)
