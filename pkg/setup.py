from setuptools import find_packages, setup

setup(
    name="stabmc",
    version="0.1.0",
    description="Model checker for concurrent stabilizer quantum protocols",
    packages=find_packages(include=["stabmc", "stabmc.*"]),
    package_data={"stabmc.tests": ["fixtures/*.qmc"]},
    python_requires=">=3.8",
    install_requires=["numpy", "pydantic>=2", "python-dotenv"],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["stabmc=stabmc.main:main"]},
)
