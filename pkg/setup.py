from setuptools import setup, find_packages

setup(
    name="pysgsvd",                       # Package name
    version="1.0.0",                      # Package version
    packages=find_packages(exclude=["tests", "apitest", "examples*"]),
    install_requires=[                    # Runtime dependencies
        "numpy>=1.24",
        "scipy>=1.10",
    ],
    entry_points={
        "console_scripts": ["sgsvd = sgbench.cli:main"],
    },
    author="",
    author_email="",
    description="Sparse graph-regularized rank-one SVD with a synthetic benchmark and evaluation toolkit",
    long_description=open("README.md").read(),  # Long description from README
    long_description_content_type="text/markdown",
    classifiers=[                        # Metadata
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires='>=3.8',              # Minimum Python version
)
