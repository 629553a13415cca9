from setuptools import setup, find_packages

setup(
    name="rskyline-kit",
    version="1.0.0",
    description="Reverse skyline engines and k-MAC candidate selection over R-tree indexes",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "pydantic>=2.0.0",
        "python-dotenv>=1.0.0",
        "numpy>=1.22.0"
    ],
    entry_points={
        "console_scripts": [
            "rskyline=src.bench.cli:main",
        ],
    },
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
    ],
)
