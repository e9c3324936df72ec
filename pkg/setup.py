from setuptools import setup

with open('README.md', 'r', encoding='utf-8') as f:
    readme = f.read()

setup(
    name='univoque',
    description='Exact Gamma construction and dimension verdicts for univoque sets of self-similar sets.',
    long_description=readme,
    long_description_content_type="text/markdown",
    license='Apache-2.0',
    version='0.1.0',
    packages=['univoque'],
    package_dir={'': 'src'},
    python_requires='>=3.10',
    install_requires=[
        'click',
        'rich',
        'platformdirs',
        'voluptuous',
        'numpy',
        'mpmath',
        'typing_extensions; python_version<"3.11"',
    ],
    tests_require=[
        'pytest',
    ],
    entry_points={
        'console_scripts': [
            'univoque = univoque.cli:main',
        ],
    },
    classifiers=[
            "Natural Language :: English",
            "Operating System :: OS Independent",
            "Programming Language :: Python",
            "Programming Language :: Python :: 3.11",
            "Programming Language :: Python :: 3.12",
            "Programming Language :: Python :: 3.13",
            "Programming Language :: Python :: 3 :: Only",
            "Topic :: Scientific/Engineering :: Mathematics",
        ],
)
