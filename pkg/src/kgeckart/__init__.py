"""Klein-Gordon bound states in an Eckart potential with equal scalar and vector parts.

Analytic levels and wavefunctions come from a shape-invariant superpotential; a
finite-difference eigensolver provides an independent check.
"""
from .core import (Branch, DomainMode, EnergyLevel, PotentialSpec, RadialFunction, RadialGrid,
                   RunConfig, SolverSettings, SuperCoeffs, default_grid, parse_config)
from .errors import KGError
from .spectrum import enumerate_levels, solve_level

__version__ = "0.1.0"

__all__ = [
    "Branch", "DomainMode", "EnergyLevel", "PotentialSpec", "RadialFunction", "RadialGrid",
    "RunConfig", "SolverSettings", "SuperCoeffs", "default_grid", "parse_config", "KGError",
    "enumerate_levels", "solve_level",
]
