from setuptools import setup, find_packages

setup(
    name="zo-sadom",
    version="0.1.0",
    packages=find_packages(exclude=["test", "test.*"]),
    install_requires=[
        "numpy",
        "scikit-learn",
        "scipy",
        "pandas"
    ],
    extras_require={
        "test": ["pytest"],
    },
    description="Stochastic and zeroth-order accelerated decentralized "
                "optimization over time-varying graphs",
    long_description="Stochastic and zeroth-order accelerated decentralized "
                     "optimization over time-varying graphs",
    entry_points={
        'console_scripts': [
            'zo_sadom = zo_sadom.scripts.sadom:main',
        ],
    },
)
