"""Numerical toolkit for a time-dependent Gross-Neveu type scattering problem.

Submodules
----------
spin          two-site operators on (C^2)^N, R-matrix, monodromy, small ED
scattering    coupling model, left/right S-matrices, coupling trajectory g(t)
yang_baxter   residual checks of the Yang-Baxter family and transport compatibility
qkz           transport operators, Jackson-sum amplitudes, Yang-Yang action
bethe         logarithmic Bethe equations, Bethe vectors, eigenvector checks
thermo        density integral equations, spinon dispersion, mass gap
corpus        golden records and replay
cli           command line front-end (``gnqkz``)
"""

from .errors import (CapacityError, ConvergenceError, DomainError, GnqkzError,
                     NumericError, SingularityError)
from .scattering import CouplingModel, g_of_t
from .qkz import KinematicFrame

__version__ = "0.1.0"

__all__ = ["CouplingModel", "KinematicFrame", "g_of_t", "GnqkzError", "DomainError",
           "SingularityError", "CapacityError", "NumericError", "ConvergenceError"]
