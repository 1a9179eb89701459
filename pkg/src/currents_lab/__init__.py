"""Multicurves in Dehn coordinates on closed hyperbolic surfaces: intersection
bounds, exact intersection by geodesic tracing, Fenchel-Nielsen holonomy and
lengths, and Monte Carlo estimators for random simple closed geodesics."""
from .errors import (
    BudgetError,
    ConstructionError,
    CurrentsError,
    DomainError,
    FormatError,
    InvalidGenusError,
    NonHyperbolicError,
    ParityError,
    ShapeError,
)
from .holonomy import FNCoords, parse_fn
from .topology import (
    DehnCoords,
    SurfaceTopology,
    build_chain_topology,
    canonicalize,
    check_parity,
    lattice_covolume,
    parse_coords,
    twist_action,
)

__version__ = "0.1.0"
