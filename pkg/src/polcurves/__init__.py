"""Combinatorial GIT stability of polarized nodal and cuspidal curves."""

__version__ = "0.1.0"

from .curve_model import CurveGraph, Vertex, Edge, classify_curve, subcurve_stats
from .multidegree import Multidegree, basic_bounds, classify_multidegree, enumerate_balanced

__all__ = [
    "CurveGraph",
    "Edge",
    "Multidegree",
    "Vertex",
    "basic_bounds",
    "classify_curve",
    "classify_multidegree",
    "enumerate_balanced",
    "subcurve_stats",
]
