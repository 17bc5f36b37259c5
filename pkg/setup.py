import setuptools
from pathlib import Path

setuptools.setup(
    name="csnorm",
    version="0.1.0",
    description="Lexical normalization, language identification and POS tagging for code-switched text",
    long_description=Path("README.md").read_text(),
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests"]),
    package_data={
        "csnorm": ["config.schema.json", "codes.yml"]
        + [
            str(path.relative_to("csnorm"))
            for path in Path("csnorm/templates").rglob("*")
            if path.is_file()
        ]
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.7",
    entry_points={"console_scripts": ["csnorm = csnorm.cli:main"]},
    install_requires=[
        "PyYAML",
        "jsonschema>=3.0.0",
        "argcomplete>=2.0.0",
        "numpy>=1.17",
    ],
)
