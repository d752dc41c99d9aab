"""Setup configuration for fdpower."""

import os
from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

# Try to read requirements.txt, fall back to hardcoded list if not found
try:
    here = os.path.abspath(os.path.dirname(__file__))
    with open(os.path.join(here, "requirements.txt"), "r", encoding="utf-8") as fh:
        requirements = [
            line.strip() for line in fh
            if line.strip() and not line.startswith("#") and not line.startswith("pytest")
        ]
except FileNotFoundError:
    requirements = [
        "click>=8.1.7",
        "rich>=13.7.0",
        "pydantic>=2.5.0",
        "pydantic-settings>=2.1.0",
        "python-dotenv>=1.0.0",
        "PyYAML>=6.0.1",
        "structlog>=25.4.0",
        "numpy>=1.24",
        "scipy>=1.10",
    ]

setup(
    name="fdpower",
    version="1.0.0",
    description="Coverage, rate, ASE and EE of full-duplex cellular networks under downlink power control",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=("tests", "tests.*", "examples", "examples.*")),
    py_modules=["extensions"],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering",
    ],
    python_requires=">=3.9",
    install_requires=requirements,
    extras_require={"test": ["pytest>=7.4"]},
    entry_points={
        "console_scripts": [
            "fdpower=cli.main:main",
        ],
    },
    include_package_data=True,
)
