"""Numerical toolkit for the hyperbolic circle problem over PSL(2,Z).

Subpackages cover half-plane geometry, exact orbit-ball enumeration,
special functions, the smoothed-cutoff kernel transforms, the geodesic
length spectrum, the geometric side of the trace formula, the spectral
main term, and an experiment harness with a CLI front end.
"""

from .geometry import GroupElement, Point, apply, distance, point_pair_invariant
from .modular_group import count, enumerate_ball_arithmetic, reduce_to_fundamental_domain

__all__ = [
    "Point",
    "GroupElement",
    "apply",
    "distance",
    "point_pair_invariant",
    "count",
    "enumerate_ball_arithmetic",
    "reduce_to_fundamental_domain",
]

__version__ = "0.1.0"
