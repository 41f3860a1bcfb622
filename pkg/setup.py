from setuptools import setup

setup(
    name="gramrecur",
    version="0.1",
    license="MIT",
    packages=["gramrecur"],
    install_requires=[
        "numpy",
        "scipy",
        "tqdm",
        "matplotlib",
        "pandas",
        "tueplots",
        "plac",
        "jax",
        "jaxlib",
    ],
    entry_points={"console_scripts": ["gram-recur=gramrecur.cli:console_main"]},
    zip_safe=False,
)
