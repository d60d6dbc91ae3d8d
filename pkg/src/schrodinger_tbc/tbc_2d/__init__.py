"""Two-dimensional rectangle solver with discrete transparent boundaries."""

from .domain import CORNERS, HORIZONTAL, SEGMENTS, SIGN, VERTICAL, DomainMap
from .interior import InteriorSolver
from .lifting import Lifting2D, lift_2d
from .schemes import SCHEMES, CqScheme, NpScheme, WorkCounters, make_scheme, parse_scheme
from .solver import (
    NumericalBreakdown,
    Solver2D,
    SupportWarning,
    boundary_neumann,
    check_support,
    constraint_residuals,
    grid_points,
)

__all__ = [
    "CORNERS",
    "HORIZONTAL",
    "SEGMENTS",
    "SIGN",
    "VERTICAL",
    "DomainMap",
    "InteriorSolver",
    "Lifting2D",
    "lift_2d",
    "SCHEMES",
    "CqScheme",
    "NpScheme",
    "WorkCounters",
    "make_scheme",
    "parse_scheme",
    "NumericalBreakdown",
    "Solver2D",
    "SupportWarning",
    "boundary_neumann",
    "check_support",
    "constraint_residuals",
    "grid_points",
]
