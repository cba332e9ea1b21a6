"""Twisted wild character varieties: fission trees, configuration spaces and Weyl groups."""

from .cyclotomic import Cyc, zeta
from .puiseux_core import INF, ExpFactor, parse_factor
from .fission_trees import Entry, PointedType, build_tree

__all__ = ["Cyc", "zeta", "INF", "ExpFactor", "parse_factor", "Entry", "PointedType", "build_tree"]
__version__ = "0.1.0"
