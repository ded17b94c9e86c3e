from setuptools import find_packages, setup

setup(
    name="retrolab",
    version="0.1.0",
    packages=find_packages(where="retrolab"),
    package_dir={"": "retrolab"},
    install_requires=[
        "matplotlib",
        "numpy",
        "pandas",
        "seaborn",
        "pytest",
        "wandb",
    ],
    entry_points={"console_scripts": ["retrolab=cli.main:main"]},
)
