from setuptools import setup, find_packages

setup(
    name="quadratic_fock",
    version="0.1",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "sympy>=1.12",
        "pydantic>=2.4.2",
        "python-dotenv>=1.0.0",
        "rich>=13.0.0",
    ],
    entry_points={
        "console_scripts": [
            "qfock=cli.cli_interface:main",
        ],
    },
    python_requires=">=3.8",
)
