"""Exact difference-of-convex decompositions of continuous piecewise linear functions."""

from .config import Caps, get_caps
from .cpwl import CPWL, AffineMap, coarsen, from_weights, is_convex, max_affine, weights
from .decomposition import (
    DecompPoint,
    enumerate_decompositions,
    is_irreducible,
    is_reduced,
    is_vertex,
    minimal_set,
    solve_reduced,
    unique_vertex_certificate,
)
from .errors import DcSplitError
from .geometry import Complex, arrangement_complex, fan2d, fan3d, validate_complex

__all__ = [
    "CPWL",
    "AffineMap",
    "Caps",
    "Complex",
    "DcSplitError",
    "DecompPoint",
    "arrangement_complex",
    "coarsen",
    "enumerate_decompositions",
    "fan2d",
    "fan3d",
    "from_weights",
    "get_caps",
    "is_convex",
    "is_irreducible",
    "is_reduced",
    "is_vertex",
    "max_affine",
    "minimal_set",
    "solve_reduced",
    "unique_vertex_certificate",
    "validate_complex",
    "weights",
]
