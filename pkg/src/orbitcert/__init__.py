"""Exact and numerical certificates for congruent orbits of solvable subgroups
acting on symmetric spaces of noncompact type, plus the Hopf circle action."""
from __future__ import annotations

from ._accel import backend
from .errors import (
    ArgumentError,
    ConfigurationError,
    NumericError,
    OrbitCertError,
    PreconditionError,
    UnsupportedModelError,
)
from .models import MatrixModel, Point, distance, make_model, make_point, origin
from .structure import SolvableStructure, solvable_structure

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "ConfigurationError",
    "MatrixModel",
    "NumericError",
    "OrbitCertError",
    "Point",
    "PreconditionError",
    "SolvableStructure",
    "UnsupportedModelError",
    "backend",
    "distance",
    "make_model",
    "make_point",
    "origin",
    "solvable_structure",
]
