"""Numerical toolkit for solitary waves of the generalized Good-Boussinesq system."""

from .errors import (CFLError, DomainError, EigenSolverError, GBLabError, ModulationDegenerateError,
                     ModulationError, NumericalError, QuadratureError)
from .grid import Grid
from .profiles import SolitonParams

__all__ = [
    "CFLError", "DomainError", "EigenSolverError", "GBLabError", "Grid", "ModulationDegenerateError",
    "ModulationError", "NumericalError", "QuadratureError", "SolitonParams",
]
__version__ = "0.1.0"
