"""Multigrid-accelerated multi-material topology optimization on structured Q4 grids.

Subpackages and modules:

- ``grid``: structured grid levels, hierarchies and transfer operators
- ``fem``: element matrices, assembly and boundary conditions
- ``solvers``: Cholesky, Jacobi/Gauss-Seidel, CG and multigrid-preconditioned CG
- ``mto``: SIMP multi-material compliance minimization
- ``bench``: Poisson solver comparison and square-wall sweeps
- ``config``, ``report``, ``cli``: configuration, artifact writers, command line
"""

from .errors import (ConfigurationError, DimensionError, MultiplierError,
                     NotPositiveDefiniteError, NumericalError, PreconditionerError,
                     SplittingError, TopoptError)
from .grid import GridHierarchy, GridLevel, build_hierarchy, prolongate, restrict
from .materials import DensityField, MaterialModel
from .mto import OptimConfig, OptimReport, optimize, square_wall
from .solvers import SolverConfig, SolveReport, solve

__version__ = "0.1.0"
