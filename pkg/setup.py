from setuptools import setup, find_packages

setup(
    name="zetalab",
    version="0.1.0",
    packages=find_packages(exclude=["tests"]),
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "pydantic>=2.9",
        "pydantic-settings",
        "python-dotenv"
    ],
    extras_require={
        "test": [
            "pytest",
            "mpmath"
        ]
    },
    entry_points={
        "console_scripts": [
            "zetalab=zetalab.main:main"
        ]
    }
)
