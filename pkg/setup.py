"""
Setup configuration for the Pipe Climber Simulator

This setup.py file configures the Python package for the quasi-static simulator
of a three-track in-pipe climbing robot driven by a three-output open differential.

Package includes:
- Differential (gear train) solver for loaded and locked outputs
- Pipe network geometry and per-track path lengths
- Track kinematics, contact forces and slip
- Fixed-step traversal simulator with error metrics
- Scenario configuration, run artifacts, figures and the pipeclimb CLI
- Comprehensive test suite

Author: Pipe Climber Simulation Team
Date: 2026
"""

from setuptools import find_packages, setup

setup(
    name="pipeclimb",                  # Package name
    version="0.1",                     # Package version
    packages=find_packages(exclude=["examples", "examples.*"]),
    package_data={"pipeclimb": ["data/*.json"]},
    python_requires=">=3.9",
    entry_points={"console_scripts": ["pipeclimb=pipeclimb.scripts.cli:main"]},
)
