"""Boundary-integral simulation of nutrient-driven tumor interface growth.

A moving closed interface separates proliferating tissue from host tissue
inside a fixed far-field boundary.  The nutrient field satisfies a two-phase
modified Helmholtz equation, the modified pressure a Laplace equation; both
are solved on the curves by Nystrom discretization with spectrally accurate
quadrature, and the interface is evolved with a semi-implicit tangent-angle
scheme.  A closed-form linear stability model of the same system is included
for validation.
"""

from tumorbim.errors import (
    ConfigError,
    DegenerateCurveError,
    GeometryError,
    InstabilityError,
    ReparametrizationError,
    SolverConvergenceError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DegenerateCurveError",
    "GeometryError",
    "InstabilityError",
    "ReparametrizationError",
    "SolverConvergenceError",
    "__version__",
]
