from setuptools import setup, find_packages
from pathlib import Path

readme_path = Path(__file__).with_name("README.md")
description = readme_path.read_text(encoding="utf-8")

setup(
    name="QuantOrd",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    python_requires=">=3.10",
    install_requires=["colorama", "numpy", "scipy", "pandas"],
    extras_require={"test": ["pytest"]},
    entry_points={
        "console_scripts": [
            "quantord = quantord.__main__:mainEntryPoint"
        ]
    },
    long_description=description,
    long_description_content_type="text/markdown"
)
